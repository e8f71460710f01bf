//! Whitespace pre-segmentation shared by training and encoding.
//!
//! A new segment starts at every whitespace character that follows a
//! non-whitespace character, so whitespace runs stay attached to the front of
//! the following word. Text without whitespace (typical Japanese) forms a
//! single segment and merges freely across its whole run.

/// Byte ranges of the segments of `text`, in order, partitioning the input.
pub fn segments(text: &str) -> Segments<'_> {
    Segments { text, pos: 0 }
}

#[derive(Debug, Clone)]
pub struct Segments<'a> {
    text: &'a str,
    pos: usize,
}

impl Iterator for Segments<'_> {
    type Item = (usize, usize);

    fn next(&mut self) -> Option<(usize, usize)> {
        if self.pos >= self.text.len() {
            return None;
        }
        let start = self.pos;
        let mut prev_ws = None;
        let mut end = self.text.len();
        for (offset, ch) in self.text[start..].char_indices() {
            let ws = ch.is_whitespace();
            if offset > 0 && ws && prev_ws == Some(false) {
                end = start + offset;
                break;
            }
            prev_ws = Some(ws);
        }
        self.pos = end;
        Some((start, end))
    }
}
