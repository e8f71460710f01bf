"""Seeded generator of plausible Japanese prose for fixtures."""

import random

PLACES = [
    "東京都", "大阪府", "京都市", "札幌市", "福岡市", "名古屋市", "横浜市", "神戸市", "仙台市", "広島市",
    "那覇市", "金沢市", "長野県", "静岡県", "新潟県", "熊本県", "鹿児島県", "青森県", "岡山県", "愛媛県",
]
ORGS = [
    "市役所", "県教育委員会", "地元の商工会議所", "大学の研究チーム", "鉄道会社", "気象台", "病院", "図書館",
    "観光協会", "自治会", "美術館", "農業協同組合", "消防本部", "警察署", "商店街振興組合", "水族館",
]
PEOPLE = [
    "市長", "担当者", "研究者", "店主", "教授", "館長", "会長", "住民", "学生", "医師", "農家の男性",
    "保護者", "職員", "観光客", "専門家", "社長",
]
TOPICS = [
    "新しい交通計画", "地域の防災訓練", "再生可能エネルギーの導入", "子育て支援の拡充", "観光客向けの案内所",
    "伝統工芸の継承", "高齢者の見守り活動", "学校給食の地産地消", "河川の清掃活動", "空き家の活用",
    "図書館の開館時間延長", "商店街の活性化", "外国語による情報発信", "医療体制の強化", "農産物の輸出",
    "駅前広場の再整備", "森林の保全", "海岸の浸食対策", "公共施設の省エネ化", "文化財の修復",
]
ITEMS = [
    "桜", "紅葉", "雪まつり", "花火大会", "朝市", "温泉", "郷土料理", "日本酒", "和菓子", "緑茶",
    "陶器", "織物", "漆器", "米", "りんご", "みかん", "牡蠣", "蕎麦", "味噌", "醤油",
]
TIMES = [
    "今年の春", "来月", "先週", "昨年度", "今後三年間", "夏休み期間中", "年末", "十月から", "週末", "来年度",
]
ADJ = [
    "大きな", "新たな", "独自の", "本格的な", "地道な", "画期的な", "身近な", "持続可能な", "丁寧な", "柔軟な",
]
REASONS = [
    "人口の減少が続いているため", "利用者からの要望が多かったため", "費用を抑える必要があるため",
    "安全性を高めるため", "若い世代の関心を集めるため", "地域経済を支えるため", "災害への備えを強めるため",
]

TEMPLATES = [
    "{place}の{org}は{time}、{topic}について発表した。",
    "{person}によると、{topic}は{reason}始まったという。",
    "{place}では{time}に{item}を楽しむ催しが開かれ、多くの人でにぎわった。",
    "{org}は{adj}取り組みとして{topic}を進めている。",
    "{person}は「{item}の魅力をもっと多くの人に知ってほしい」と話している。",
    "関係者は{topic}の効果を確かめながら、{time}も続ける方針だ。",
    "{place}産の{item}は品質の高さで知られ、海外からの注文も増えている。",
    "会場には{item}を使った料理が並び、訪れた人たちは味の違いを比べていた。",
    "{org}の{person}は、{reason}{adj}工夫が欠かせないと説明した。",
    "調査の結果、{topic}に賛成する人は半数を超えたことがわかった。",
    "{time}からは{place}の小学校でも{topic}の授業が始まる予定だ。",
    "専門家は{topic}について、長い目で見た準備が大切だと指摘している。",
    "{place}を訪れた{person}は、{item}の歴史について熱心に質問していた。",
    "今回の計画では、{org}と{org2}が協力して費用の一部を負担する。",
    "{item}の収穫は天候に左右されやすく、{person}たちは空を見上げる日が続く。",
    "一方で、{topic}には課題も多く、{person}からは慎重な意見も出ている。",
]


def sentence(rng: random.Random) -> str:
    t = rng.choice(TEMPLATES)
    return t.format(
        place=rng.choice(PLACES),
        org=rng.choice(ORGS),
        org2=rng.choice(ORGS),
        person=rng.choice(PEOPLE),
        topic=rng.choice(TOPICS),
        item=rng.choice(ITEMS),
        time=rng.choice(TIMES),
        adj=rng.choice(ADJ),
        reason=rng.choice(REASONS),
    )


def paragraph(rng: random.Random, lo: int = 3, hi: int = 7) -> str:
    return "".join(sentence(rng) for _ in range(rng.randint(lo, hi)))


EN_WORDS = (
    "the of and to in is was for on that with as by at from it an be this are or have which one had not but "
    "what all were when we there can more if out so said about into than them only other new some time could "
    "these two may first then do any like my now over such our man me even most made after also did many before "
    "must through back years where much your way well down should because each just those people how too little "
    "state good very make world still own see men work long get here between both life being under never day same "
    "another know while last might us great old year off come since against go came right used take three"
).split()


def english_line(rng: random.Random) -> str:
    words = [rng.choice(EN_WORDS) for _ in range(rng.randint(8, 20))]
    return " ".join(words).capitalize() + "."
