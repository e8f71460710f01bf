"""Regenerates the files under fixtures/ deterministically.

Run from the repository root: python3 scripts/gen_fixtures.py
Expected values in the manifests are computed here with independent Python
code, never by calling the Rust implementation.
"""

import json
import random
import unicodedata
from itertools import combinations
from pathlib import Path

from jatext import english_line, paragraph, sentence

ROOT = Path(__file__).resolve().parent.parent / "fixtures"


def write_jsonl(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def write_json(path: Path, value) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(value, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def shingles(text: str, k: int = 5) -> set:
    return {text[i : i + k] for i in range(len(text) - k + 1)}


def jaccard(a: str, b: str, k: int = 5) -> float:
    sa, sb = shingles(a, k), shingles(b, k)
    return len(sa & sb) / len(sa | sb) if sa | sb else 0.0


def normalize(text: str) -> str:
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    text = "".join(c for c in text if c in "\t\n" or unicodedata.category(c) != "Cc")
    text = unicodedata.normalize("NFKC", text)
    lines = [line.strip() for line in text.split("\n")]
    out, blank = [], 0
    for line in lines:
        if not line:
            blank += 1
            continue
        if out:
            out.extend([""] * min(blank, 2))
        blank = 0
        out.append(line)
    return "\n".join(out)


# ---------------------------------------------------------------- tokenizer


def tokenizer_fixtures() -> None:
    rng = random.Random(7)
    ja, size = [], 0
    while size < 60_000:
        text = paragraph(rng, 4, 9)
        ja.append({"id": f"ja{len(ja):04d}", "text": text})
        size += len(text.encode("utf-8"))
    write_jsonl(ROOT / "tokenizer" / "ja_corpus.jsonl", ja)

    rng = random.Random(8)
    en = [{"id": f"en{i:04d}", "text": " ".join(english_line(rng) for _ in range(4))} for i in range(300)]
    write_jsonl(ROOT / "tokenizer" / "en_corpus.jsonl", en)


# ---------------------------------------------------------------- PII

PII_CASES = [
    ("お問い合わせは info@example.co.jp まで", True),
    ("連絡先: taro.yamada+news@mail.example.com", True),
    ("Send it to support@company.io today.", True),
    ("E-mail:hanako_s@example.ne.jp", True),
    ("tel: 090-1234-5678", True),
    ("電話 03-1234-5678 までご連絡ください", True),
    ("携帯は08012345678です", True),
    ("TEL 06 6123 4567", True),
    ("+81-90-1234-5678", True),
    ("call +1 415 555 0132 now", True),
    ("代表番号は045-123-4567です", True),
    ("070-9876-5432に電話", True),
    ("フリーダイヤル 0120-123-456", True),
    ("問い合わせ:050-3123-4567", True),
    ("a.b-c@sub.domain.org に送信", True),
    ("USER@EXAMPLE.COM", True),
    ("電話番号:0312345678", True),
    ("London office +44 20 7946 0958", True),
    ("連絡は080 1234 5678まで", True),
    ("TEL.011-222-3333(平日のみ)", True),
    ("2024-01-15に開催", False),
    ("価格は12,800円です", False),
    ("注文番号 1234-5678-9012", False),
    ("郵便番号 100-0001", False),
    ("ISBN 978-4-06-123456-7", False),
    ("バージョン 3.14.159", False),
    ("@username でメンション", False),
    ("foo@bar に送った", False),
    ("会員番号 0000-1111-2222", False),
    ("座標 35.6895, 139.6917", False),
    ("1,000,000人が参加", False),
    ("IPアドレス 192.168.0.1", False),
    ("時刻 12:30-13:45", False),
    ("シリアル SN-0901234567890", False),
    ("型番 ABC0312345678", False),
    ("2023年度の売上は3,456億円", False),
    ("user at example dot com", False),
    ("メールアドレスを入力してください", False),
    ("気温は+12度まで上がった", False),
    ("口座番号 1234567", False),
]


def pii_fixtures() -> None:
    cases = [{"text": t, "contains_pii": p} for t, p in PII_CASES]
    assert len(cases) == 40
    write_json(ROOT / "corpus" / "pii_cases.json", {"version": 1, "cases": cases})


# ---------------------------------------------------------------- quality

SPAM_WORDS = ["激安", "送料無料", "今すぐ", "限定", "最安値", "クリック", "当選", "無料", "特価", "セール", "在庫処分", "必見"]
SYMBOLS = "★☆♪◆■□▲△▼▽○●◎※→←↑↓♥♡"
NAV = ["ホーム", "ログイン", "会員登録", "カート", "お問い合わせ", "サイトマップ", "利用規約", "ヘルプ", "新着情報", "ランキング"]


def bad_document(rng: random.Random) -> str:
    kind = rng.randrange(5)
    if kind == 0:
        parts = []
        for _ in range(rng.randint(8, 20)):
            parts.append(rng.choice(SYMBOLS) * rng.randint(1, 3) + rng.choice(SPAM_WORDS))
        return "".join(parts) + "!!!"
    if kind == 1:
        return " | ".join(rng.choice(NAV) for _ in range(rng.randint(8, 16)))
    if kind == 2:
        phrase = rng.choice(SPAM_WORDS) + rng.choice(SPAM_WORDS)
        return (phrase + rng.choice(SYMBOLS)) * rng.randint(10, 25)
    if kind == 3:
        rows = [f"{rng.randint(1000, 99999)} {rng.randint(10, 999)} {rng.randint(1, 99)}%" for _ in range(rng.randint(6, 14))]
        return "\n".join(rows)
    words = [rng.choice(SPAM_WORDS + NAV) for _ in range(rng.randint(10, 25))]
    return " ".join(words) + rng.choice(SYMBOLS) * 5


def quality_fixtures() -> None:
    rng = random.Random(11)
    rows = []
    for i in range(250):
        good = i % 2 == 0
        text = paragraph(rng, 2, 6) if good else bad_document(rng)
        rows.append({"id": f"q{i:03d}", "text": text, "label": good})
    write_jsonl(ROOT / "corpus" / "quality_train.jsonl", rows[:200])
    write_jsonl(ROOT / "corpus" / "quality_heldout.jsonl", rows[200:])


# ---------------------------------------------------------------- pipeline


def junk_documents() -> list:
    return [
        ("short", "テスト投稿です。"),
        ("short", "続きはこちら"),
        ("short", "404 Not Found"),
        ("symbol ratio", "★☆♪◆■□▲△▼▽○●◎※→←↑↓♥♡" * 3 + "セール"),
        ("symbol ratio", "♪♪♪ 激安 ♪♪♪ ◆◆◆ 今すぐ ◆◆◆ ■■■ 送料無料 ■■■ ▲▲▲ 限定 ▲▲▲ ※※※"),
        ("symbol ratio", "→→→→ クリック ←←←← ↑↑↑↑ 当選 ↓↓↓↓ ♥♥♥♥ 無料 ♡♡♡♡ ●●●● 特価 ○○○○"),
        ("repetition", "あ" * 300),
        ("repetition", "いいね!" * 80),
        ("repetition", "買う買う買う" * 40),
        ("repetition", "ok ok ok ok " * 30),
    ]


def pipeline_fixtures() -> None:
    rng = random.Random(23)
    good = []
    while len(good) < 75:
        text = paragraph(rng, 4, 7)
        if all(jaccard(text, other) < 0.5 for other in good):
            good.append(text)

    pii = {3: ("email", "お問い合わせは info@example.co.jp までお寄せください。"),
           17: ("email", "詳細は担当の sato.k@city.example.lg.jp に連絡してほしいという。"),
           29: ("email", "申し込みは entry@festival.example.com で受け付けている。"),
           41: ("phone", "問い合わせは事務局の 03-1234-5678 まで。"),
           58: ("phone", "予約は 090-8765-4321 で受け付ける。")}
    for idx, (_, extra) in pii.items():
        good[idx] = good[idx] + extra

    # Dirty variants that normalize back to the clean text.
    def dirty(text: str, how: int) -> str:
        if how == 0:
            return text + "\n"
        if how == 1:
            return "  " + text + "  \r\n"
        return text + "\n\n\n"

    docs = []
    for i, text in enumerate(good):
        # A handful of originals carry stray whitespace or CRLF endings.
        if i % 15 == 7:
            text_in = "  " + text + "\r\n"
        elif i % 15 == 11:
            text_in = text + "　"
        else:
            text_in = text
        docs.append({"id": f"g{i:02d}", "text": text_in, "role": "unique", "pii": pii.get(i, (None,))[0]})

    plain = [i for i in range(75) if i not in pii]
    dup_src = rng.sample(plain, 10)
    for n, i in enumerate(dup_src):
        docs.append({"id": f"x{n:02d}", "text": dirty(good[i], n % 3), "role": "exact_dup", "of": f"g{i:02d}"})

    tail = "この件は引き続き注目される。"
    long_enough = [i for i in plain if i not in dup_src and jaccard(good[i], good[i] + tail) >= 0.9]
    near_src = rng.sample(long_enough, 5)
    for n, i in enumerate(near_src):
        base = good[i]
        variant = base + tail
        j = jaccard(base, variant)
        assert j >= 0.9, j
        docs.append({"id": f"n{n:02d}", "text": variant, "role": "near_dup", "of": f"g{i:02d}", "exact_jaccard": round(j, 4)})

    for n, (reason, text) in enumerate(junk_documents()):
        docs.append({"id": f"j{n:02d}", "text": text, "role": "junk", "reason": reason})

    # Every copy lands somewhere after its original.
    order = docs[:75]
    rest = docs[75:]
    rng.shuffle(rest)
    for d in rest:
        lo = next(k for k, o in enumerate(order) if o["id"] == d["of"]) + 1 if "of" in d else 0
        order.insert(rng.randint(lo, len(order)), d)
    first_pos = {d["id"]: k for k, d in enumerate(order)}
    for d in order:
        if "of" in d:
            assert first_pos[d["of"]] < first_pos[d["id"]]

    # Independent accounting.
    normalized = [normalize(d["text"]) for d in order]
    modified_normalize = sum(n != d["text"] for n, d in zip(normalized, order))
    for d, n in zip(order, normalized):
        if d["role"] == "exact_dup":
            assert n == normalize(next(o["text"] for o in order if o["id"] == d["of"]))
    for a, b in combinations([n for n, d in zip(normalized, order) if d["role"] == "unique"], 2):
        assert jaccard(a, b) < 0.5
    redactions = {"email": 0, "phone": 0}
    for d in order:
        if d.get("pii"):
            redactions[d["pii"]] += 1

    write_jsonl(ROOT / "corpus" / "pipeline_100.jsonl", [{"id": d["id"], "text": d["text"]} for d in order])
    manifest = {
        "version": 1,
        "composition": {"unique": 75, "with_pii": len(pii), "exact_dup": 10, "near_dup": 5, "junk": 10},
        "documents": [{k: v for k, v in d.items() if k != "text" and v is not None} for d in order],
        "expected_report": {
            "total_documents_in": 100,
            "stages": {
                "normalize": {"seen": 100, "kept": 100, "dropped": 0, "modified": modified_normalize},
                "pii": {"seen": 100, "kept": 100, "dropped": 0, "modified": len(pii)},
                "exact_dedup": {"seen": 100, "kept": 90, "dropped": 10, "modified": 0},
                "near_dedup": {"seen": 90, "kept": 85, "dropped": 5, "modified": 0},
                "heuristics": {"seen": 85, "kept": 75, "dropped": 10, "modified": 0},
                "classifier": {"seen": 75, "kept": 75, "dropped": 0, "modified": 0},
            },
            "total_documents_out": 75,
            "redactions": redactions,
        },
    }
    write_json(ROOT / "corpus" / "pipeline_manifest.json", manifest)


# ---------------------------------------------------------------- minhash

CJK = [chr(c) for c in range(0x4E00, 0x9FA0)]


def minhash_fixtures() -> None:
    rng = random.Random(31)
    # J = s / (s + 2u) for a shared run of s + 4 characters and u unique ones per side.
    plan = [(0.0, None)] * 3 + [(0.3, (60, 70))] * 4 + [(0.5, (100, 50))] * 4 + [(0.7, (140, 30))] * 3 + [(0.9, (180, 10))] * 3 + [(1.0, None)] * 3
    pairs = []
    for target, shape in plan:
        pool = rng.sample(CJK, 400)
        if target == 0.0:
            a, b = "".join(pool[:150]), "".join(pool[150:300])
        elif target == 1.0:
            a = b = "".join(pool[:150])
        else:
            s, u = shape
            shared = "".join(pool[: s + 4])
            a = shared + "".join(pool[s + 4 : s + 4 + u])
            b = shared + "".join(pool[s + 4 + u : s + 4 + 2 * u])
        j = jaccard(a, b)
        assert abs(j - target) < 1e-12, (target, j)
        pairs.append({"a": a, "b": b, "exact_jaccard": target})
    write_json(ROOT / "corpus" / "minhash_pairs.json", {"version": 1, "shingle_size": 5, "pairs": pairs})


# ---------------------------------------------------------------- eval


def bigrams(units):
    out = {}
    for x, y in zip(units, units[1:]):
        out[(x, y)] = out.get((x, y), 0) + 1
    return out


def rouge2_char(h: str, r: str) -> float:
    hu = [c for c in h if not c.isspace()]
    ru = [c for c in r if not c.isspace()]
    hb, rb = bigrams(hu), bigrams(ru)
    overlap = sum(min(n, rb.get(k, 0)) for k, n in hb.items())
    if not hb or not rb or overlap == 0:
        return 0.0
    p, rc = overlap / sum(hb.values()), overlap / sum(rb.values())
    return 2 * p * rc / (p + rc)


def eval_fixtures() -> None:
    d = ROOT / "eval"
    rng = random.Random(47)

    mc_ex = [
        {"question": "日本の首都はどこ?", "choices": ["大阪", "東京", "京都"], "gold_index": 1},
        {"question": "一年は何か月?", "choices": ["十二", "十", "六"], "gold_index": 0},
    ]
    mc = [
        {"id": "mc1", "question": "富士山がある国は?", "choices": ["日本", "中国", "韓国"], "gold_index": 0},
        {"id": "mc2", "question": "水の化学式は?", "choices": ["CO2", "H2O", "O2"], "gold_index": 1},
        {"id": "mc3", "question": "一週間は何日?", "choices": ["五日", "六日", "七日"], "gold_index": 2},
        {"id": "mc4", "question": "太陽が昇る方角は?", "choices": ["東", "西", "南"], "gold_index": 0},
        {"id": "mc5", "question": "桜が咲く季節は?", "choices": ["春", "夏", "冬"], "gold_index": 0},
    ]
    # Lookup scores: the mock gets mc1-mc3 right and mc4-mc5 wrong.
    chosen = {"mc1": 0, "mc2": 1, "mc3": 2, "mc4": 1, "mc5": 2}
    ll = []
    for inst in mc:
        suffix = f"質問: {inst['question']}\n回答:"
        for i, c in enumerate(inst["choices"]):
            ll.append({"context_suffix": suffix, "continuation": f" {c}", "value": -1.0 if i == chosen[inst["id"]] else -4.0 - i})

    em_ex = [{"question": "日本で一番高い山は?", "references": ["富士山"]}]
    em = [
        {"id": "em1", "question": "日本で一番長い川は?", "references": ["信濃川"]},
        {"id": "em2", "question": "北海道の道庁所在地は?", "references": ["札幌", "札幌市"]},
        {"id": "em3", "question": "英語で「ありがとう」は?", "references": ["Thank you"]},
        {"id": "em4", "question": "一番大きな惑星は?", "references": ["木星"]},
    ]
    gen_answers = {"em1": " 信濃川。\n\n質問: 次", "em2": " 札幌市です", "em3": " THANK YOU!", "em4": " 土星"}
    em_expected = [True, False, True, False]

    summaries = []
    for i in range(10):
        ref = paragraph(rng, 1, 2)
        words = list(ref)
        # Perturb a varying share of characters so scores spread out.
        for _ in range(i * 3):
            words[rng.randrange(len(words))] = rng.choice("あいうえおかきくけこ")
        hyp = "".join(words)
        if i == 9:
            hyp = sentence(rng)
        summaries.append({"id": f"sum{i}", "question": f"記事{i}", "references": [ref], "hypothesis": hyp})
    sum_ex = [{"question": "記事例", "references": ["要約例です。"]}]

    gen = [{"context_suffix": f"質問: {inst['question']}\n回答:", "text": gen_answers[inst["id"]]} for inst in em]
    gen += [{"context_suffix": f"記事: {s['question']}\n要約:", "text": s["hypothesis"]} for s in summaries]

    write_jsonl(d / "data" / "mc.exemplars.jsonl", mc_ex)
    write_jsonl(d / "data" / "mc.jsonl", mc)
    write_jsonl(d / "data" / "em.exemplars.jsonl", em_ex)
    write_jsonl(d / "data" / "em.jsonl", em)
    write_jsonl(d / "data" / "sum.exemplars.jsonl", sum_ex)
    write_jsonl(d / "data" / "sum.jsonl", [{k: v for k, v in s.items() if k != "hypothesis"} for s in summaries])
    write_json(d / "mock_scorer.json", {"mode": "lookup", "loglikelihood": ll, "generate": gen, "default_loglikelihood": -100.0})

    def task(name, ttype, metric, shots, prompt, stem, excluded=False):
        return {
            "name": name, "task_type": ttype, "n_shots": shots,
            "template": {"prompt": prompt, "answer": " {answer}", "separator": "\n\n"},
            "exemplars_file": f"data/{stem}.exemplars.jsonl", "data": f"data/{stem}.jsonl",
            "metric_name": metric, "excluded_from_7avg": excluded,
        }

    suite = {"version": 1, "name": "mock", "tasks": [
        task("MC", "multiple_choice", "acc", 2, "質問: {question}\n回答:", "mc"),
        task("EM", "generate_em", "em", 1, "質問: {question}\n回答:", "em"),
        task("SUM", "generate_rouge2", "rouge-2", 1, "記事: {question}\n要約:", "sum", excluded=True),
    ]}
    write_json(d / "suite.json", suite)

    rouge = [rouge2_char(s["hypothesis"].split("\n\n")[0], s["references"][0]) for s in summaries]
    mc_value = 100 * 3 / 5
    em_value = 100 * sum(em_expected) / len(em_expected)
    sum_value = 100 * sum(rouge) / len(rouge)
    write_json(d / "expected.json", {
        "version": 1,
        "values": {"MC": mc_value, "EM": em_value, "SUM": sum_value},
        "per_summary_rouge2": rouge,
        "avg": (mc_value + em_value + sum_value) / 3,
        "avg_excl": (mc_value + em_value) / 2,
    })


if __name__ == "__main__":
    tokenizer_fixtures()
    pii_fixtures()
    quality_fixtures()
    pipeline_fixtures()
    minhash_fixtures()
    eval_fixtures()
    print("fixtures written to", ROOT)
