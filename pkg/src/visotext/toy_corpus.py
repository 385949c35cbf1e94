"""Deterministic generator for the bundled toy corpora.

``toy_social`` imitates Vietnamese social-media comments (teencode, emoji,
missing diacritics, merged words); ``toy_news`` imitates formal news prose.
Both are regenerated bit-identically by ``python -m visotext.toy_corpus``.
"""

from __future__ import annotations

import random
from importlib import resources
from pathlib import Path

from .corpus import Comment, Corpus, parse_corpus, save_corpus
from .diacritics import strip_all_diacritics

SOCIAL_SIZE = 5000
NEWS_SIZE = 3000
SEED = 2023

PRONOUNS = ["e", "em", "a", "anh", "chị", "c", "mình", "mk", "tui", "t", "b", "bạn", "mn", "ad", "shop", "ông", "bà"]
ADDRESSEES = ["anh", "chị", "em", "bạn", "shop", "ad", "mn", "mọi người", "các bạn", "b", "a", "c"]
THANKS = ["cảm ơn", "cảmơn", "cảm ơn", "camon", "cám ơn", "tks", "thanks", "cảmơn nhiều"]
POS_ADJ = ["đẹp", "xinh", "ngon", "xịn", "đỉnh", "hay", "dễ thương", "chất", "tốt", "ổn", "mượt", "rẻ", "đáng yêu", "tuyệt"]
NEG_ADJ = ["tệ", "dở", "xấu", "chán", "ngu", "lỗi", "đắt", "nhạt", "phèn", "láo", "kém", "vô duyên"]
INTENS = ["quá", "lắm", "vãi", "vl", "cực", "thật sự", "quá trời", "dã man", "hết nấc", "ghê"]
PARTICLES = ["nha", "nhé", "ạ", "á", "nè", "luôn", "đó", "ha", "hen", "nhỉ", "thế", "vậy", "z", "ak"]
NOUNS = [
    "sản phẩm", "hàng", "áo", "váy", "giày", "son", "điện thoại", "clip", "video", "bài hát", "phim",
    "quán", "món", "trà sữa", "cơm", "bánh", "đồ ăn", "ship", "giá", "màu", "chất vải", "dịch vụ",
    "nhân viên", "cái con đồ chơi", "thanh niên", "idol", "team", "trận", "game",
]
VERBS = ["mua", "ăn", "xem", "nghe", "đặt", "thích", "ghét", "mê", "chơi", "đi", "coi", "order", "dùng", "thử"]
TEEN = [
    "ko", "k", "hok", "hông", "khum", "dc", "đc", "j", "vs", "ms", "bik", "bít", "ntn", "cx", "r", "trc",
    "iu", "thik", "cko", "vj", "wá", "lm", "ns", "nhìu", "mún", "lun", "bh", "ngta",
]
QUESTIONS = [
    "mua ở đâu", "bao nhiêu tiền", "giá bao nhiêu", "còn hàng ko", "ship ko", "có size ko", "ở đâu vậy",
    "ai biết ko", "sao vậy", "là ai z", "đi đâu đó", "ăn cơm chưa", "ăng kơmmm chưa", "khi nào có",
]
LAUGHS = ["haha", "hihi", "hehe", "kkk", "kaka", "=))", ":))", "huhu", "lol", "hahaha"]
EMOJI_POS = ["😎", "😍", "🥰", "\u2764\ufe0f", "👍", "😊", "🔥", "🤩", "💯", "👏", "😘", "✨", "🙏", "😁"]
EMOJI_NEG = ["😡", "😒", "🙄", "😤", "👎", "😭", "💩", "🤬", "😞", "😑"]
EMOJI_FUN = ["😂", "🤣", "😆", "😅", "🤭", "😜", "🙈"]


def _emojis(rng: random.Random, pool: list[str]) -> str:
    e = rng.choice(pool)
    k = rng.choices([1, 2, 3], weights=[5, 3, 2])[0]
    return e * k


def _social_comment(rng: random.Random) -> tuple[str, str]:
    label = rng.choices(["positive", "negative", "neutral"], weights=[4, 3, 3])[0]
    parts: list[str] = []
    tail = ""
    if label == "positive":
        kind = rng.randrange(5)
        if kind == 0:
            parts = [rng.choice(PRONOUNS), rng.choice(THANKS), rng.choice(ADDRESSEES)]
        elif kind == 1:
            parts = [rng.choice(NOUNS), rng.choice(POS_ADJ), rng.choice(INTENS)]
        elif kind == 2:
            parts = [rng.choice(PRONOUNS), rng.choice(["thích", "mê", "iu", "thik", "yêu"]), rng.choice(NOUNS), "này", rng.choice(INTENS)]
        elif kind == 3:
            parts = [rng.choice(NOUNS), rng.choice(POS_ADJ), rng.choice(PARTICLES), rng.choice(ADDRESSEES), rng.choice(THANKS)]
        else:
            parts = [rng.choice(["đã", "sẽ", "ms"]), rng.choice(VERBS), rng.choice(NOUNS), rng.choice(POS_ADJ), rng.choice(PARTICLES)]
        if rng.random() < 0.75:
            tail = _emojis(rng, EMOJI_POS)
    elif label == "negative":
        kind = rng.randrange(4)
        if kind == 0:
            parts = [rng.choice(NOUNS), rng.choice(NEG_ADJ), rng.choice(INTENS)]
        elif kind == 1:
            parts = [rng.choice(["ko", "k", "hok", "không", "chẳng"]), rng.choice(["mua", "xem", "ăn", "thích"]), rng.choice(["nữa", "lần nào nữa", "đâu"]), rng.choice(PARTICLES)]
        elif kind == 2:
            parts = ["đúng là", rng.choice(["lũ", "bọn", "cái"]), rng.choice(["thanh niên", "người", "shop"]), rng.choice(NEG_ADJ), rng.choice(INTENS)]
        else:
            parts = [rng.choice(PRONOUNS), rng.choice(["thất vọng", "bực", "chán", "tức"]), rng.choice(INTENS), rng.choice(["luôn", "á", "thật"])]
        if rng.random() < 0.6:
            tail = _emojis(rng, EMOJI_NEG)
    else:
        kind = rng.randrange(4)
        if kind == 0:
            parts = [rng.choice(NOUNS), "này", rng.choice(QUESTIONS), rng.choice(ADDRESSEES)]
        elif kind == 1:
            parts = [rng.choice(PRONOUNS), rng.choice(TEEN), rng.choice(["biết", "hiểu", "nghĩ"]), rng.choice(PARTICLES)]
        elif kind == 2:
            parts = [rng.choice(LAUGHS), rng.choice(PRONOUNS), rng.choice(VERBS), rng.choice(NOUNS), rng.choice(PARTICLES)]
        else:
            parts = [rng.choice(["cười", "vãi", "ôi", "trời ơi"]), rng.choice(LAUGHS)]
        if rng.random() < 0.5:
            tail = _emojis(rng, EMOJI_FUN)
    if rng.random() < 0.3:
        parts.insert(rng.randrange(len(parts) + 1), rng.choice(TEEN))
    if rng.random() < 0.2:
        parts.append(rng.choice(LAUGHS))
    text = " ".join(parts)
    if tail:
        # Emoji are often glued to the previous word, as in "anh😎😎".
        text += ("" if rng.random() < 0.4 else " ") + tail
    if rng.random() < 0.15:
        text = strip_all_diacritics(text)
    if rng.random() < 0.1:
        text = text[:1].upper() + text[1:]
    return text, label


SUBJECTS = [
    "Bộ Y tế", "Chính phủ", "Ủy ban nhân dân thành phố", "Ngân hàng Nhà nước", "Tổng cục Thống kê",
    "Bộ Giáo dục và Đào tạo", "Sở Giao thông vận tải", "các doanh nghiệp", "người dân", "cơ quan chức năng",
    "Thủ tướng", "Quốc hội", "lực lượng công an", "ngành du lịch", "nhiều địa phương",
]
NEWS_VERBS = [
    "đã công bố", "vừa ban hành", "đang triển khai", "tiếp tục đẩy mạnh", "đề xuất", "yêu cầu",
    "thông báo", "đã phê duyệt", "kiểm tra", "tổ chức", "ghi nhận", "hướng dẫn",
]
NEWS_OBJECTS = [
    "kế hoạch phát triển kinh tế", "chính sách hỗ trợ người lao động", "quy định mới về giao thông",
    "chương trình tiêm chủng", "dự án cải tạo hạ tầng", "kết quả tăng trưởng quý ba", "phương án tuyển sinh",
    "báo cáo tình hình dịch bệnh", "gói tín dụng ưu đãi", "chiến lược chuyển đổi số", "biện pháp bảo vệ môi trường",
    "hoạt động xuất khẩu nông sản", "kế hoạch phòng chống thiên tai",
]
PLACES = ["Hà Nội", "Thành phố Hồ Chí Minh", "Đà Nẵng", "Cần Thơ", "Hải Phòng", "Huế", "Quảng Ninh", "Nghệ An", "Khánh Hòa"]
TIMES = ["trong năm nay", "trong tháng tới", "từ đầu năm", "trong tuần qua", "vào cuối quý", "trong giai đoạn mới"]
CLAUSES = [
    "nhằm nâng cao chất lượng cuộc sống", "góp phần ổn định thị trường", "theo đúng lộ trình đã đề ra",
    "với sự tham gia của nhiều chuyên gia", "bảo đảm an toàn cho người dân", "để thúc đẩy tăng trưởng bền vững",
]


def _news_sentence(rng: random.Random) -> str:
    kind = rng.randrange(3)
    if kind == 0:
        s = f"{rng.choice(SUBJECTS)} {rng.choice(NEWS_VERBS)} {rng.choice(NEWS_OBJECTS)} tại {rng.choice(PLACES)} {rng.choice(TIMES)}"
    elif kind == 1:
        s = f"Theo {rng.choice(SUBJECTS)}, {rng.choice(NEWS_OBJECTS)} {rng.choice(TIMES)} {rng.choice(CLAUSES)}"
    else:
        n = rng.randrange(2, 98)
        s = f"Tại {rng.choice(PLACES)}, {rng.choice(SUBJECTS)} {rng.choice(NEWS_VERBS)} {n} {rng.choice(['trường hợp', 'dự án', 'doanh nghiệp', 'hộ gia đình'])} {rng.choice(CLAUSES)}"
    s = s[0].upper() + s[1:]
    return s + "."


def generate_social(n: int = SOCIAL_SIZE, seed: int = SEED) -> Corpus:
    rng = random.Random(seed)
    comments = []
    for i in range(n):
        text, label = _social_comment(rng)
        comments.append(Comment(f"social-{i:05d}", text, label=label, source=rng.choice(["facebook", "tiktok", "youtube"])))
    return Corpus(tuple(comments), name="toy_social")


def generate_news(n: int = NEWS_SIZE, seed: int = SEED) -> Corpus:
    rng = random.Random(seed + 1)
    return Corpus(tuple(Comment(f"news-{i:05d}", _news_sentence(rng), source="news") for i in range(n)), name="toy_news")


def load_toy(name: str) -> Corpus:
    """Load a bundled corpus: ``"social"`` or ``"news"``."""
    fname = {"social": "toy_social.jsonl", "news": "toy_news.jsonl"}[name]
    with resources.files("visotext").joinpath(f"data/{fname}").open("r", encoding="utf-8") as fh:
        return parse_corpus(fh, name=f"toy_{name}", source_name=fname)


def main() -> None:
    out = Path(__file__).parent / "data"
    save_corpus(generate_social(), out / "toy_social.jsonl")
    save_corpus(generate_news(), out / "toy_news.jsonl")


if __name__ == "__main__":
    main()
