#![allow(dead_code)]
pub mod oracle;

use proptest::prelude::*;

/// Mixed-script strings: ASCII, kana, kanji, emoji, astral-plane, combining marks.
pub fn mixed_unicode() -> impl Strategy<Value = String> {
    let ch = prop_oneof![
        3 => proptest::char::range('a', 'z'),
        1 => Just(' '),
        1 => Just('\n'),
        2 => proptest::char::range('\u{3041}', '\u{3096}'),
        2 => proptest::char::range('\u{4E00}', '\u{4FFF}'),
        1 => proptest::char::range('\u{1F300}', '\u{1F64F}'),
        1 => proptest::char::range('\u{20000}', '\u{2A6DF}'),
        1 => proptest::char::range('\u{0300}', '\u{036F}'),
        1 => any::<char>(),
    ];
    proptest::collection::vec(ch, 0..48).prop_map(|v| v.into_iter().collect())
}

/// Short strings over a tiny alphabet so pairs repeat.
pub fn small_alphabet_corpus() -> impl Strategy<Value = Vec<String>> {
    let ch = prop_oneof![
        Just('a'), Just('b'), Just('c'), Just(' '), Just('あ'), Just('い'), Just('日'), Just('本'),
    ];
    let text = proptest::collection::vec(ch, 1..40).prop_map(|v| v.into_iter().collect::<String>());
    proptest::collection::vec(text, 1..5)
        .prop_filter("at most 200 characters", |texts| texts.iter().map(|t| t.chars().count()).sum::<usize>() <= 200)
}
