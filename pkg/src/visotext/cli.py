"""``visotext`` command line: composable pipeline stages over JSON Lines corpora.

Exit status: 0 success, 1 user error (bad flags, config or missing files),
2 data error (malformed records, schema or consistency violations).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import io
import json
import sys
import time
from pathlib import Path
from typing import Any, Callable, Optional

from . import __version__
from .corpus import Comment, Corpus, CorpusError, atomic_write_text, dump_jsonl, parse_corpus
from .diacritics import VALID_PERCENTAGES, comment_seed, strip_partial
from .masking import MaskConfig, plan_masks, sweep_rates
from .metrics import classification_report, paired_t_test, span_report
from .normalize import (
    CleaningConfig,
    EmojiLexicon,
    TeencodeLexicon,
    clean_corpus,
    emojis_to_text,
    normalize_teencode,
    remove_emojis,
)
from .spans import RemapOptions, SpanLabeledSeq, remap_comment
from .tokenizer import Encoding, UnigramVocab, VocabError, token_length_stats
from .trainer import TrainerConfig, UnigramTrainer

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_USER, EXIT_DATA = 0, 1, 2


class UserError(Exception):
    pass


class DataError(Exception):
    pass


# Config -----------------------------------------------------------------------

NORMALIZE_DEFAULTS = {"teencode": True, "teencode_lexicon": None, "emoji": "keep", "emoji_lexicon": None}
PERTURB_DEFAULTS = {"diacritics": 100}
SECTIONS: dict[str, Any] = {
    "clean": CleaningConfig,
    "normalize": NORMALIZE_DEFAULTS,
    "perturb": PERTURB_DEFAULTS,
    "tokenizer": TrainerConfig,
    "mask": MaskConfig,
}


def _section_keys(section: str) -> set[str]:
    shape = SECTIONS[section]
    if isinstance(shape, dict):
        return set(shape)
    # The mask seed comes from the top-level seed.
    return {f.name for f in dataclasses.fields(shape)} - {"seed"}


def load_config(path: Optional[str]) -> dict:
    """Read a TOML pipeline config, rejecting unknown sections and keys."""
    if path is None:
        return {"seed": 0}
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise UserError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise UserError(f"config {path}: {e}") from None
    cfg: dict = {"seed": 0}
    for key, value in raw.items():
        if key == "seed":
            if not isinstance(value, int):
                raise UserError("config 'seed' must be an integer")
            cfg["seed"] = value
        elif key in SECTIONS:
            if not isinstance(value, dict):
                raise UserError(f"config [{key}] must be a table")
            unknown = set(value) - _section_keys(key)
            if unknown:
                raise UserError(f"config [{key}]: unknown keys {sorted(unknown)}")
            cfg[key] = dict(value)
        else:
            raise UserError(f"config: unknown key or section {key!r}")
    return cfg


def _merged(cfg: dict, section: str, overrides: dict) -> dict:
    out = dict(cfg.get(section, {}))
    out.update({k: v for k, v in overrides.items() if v is not None})
    return out


def _build(cls, values: dict):
    try:
        return cls(**values)
    except (TypeError, ValueError) as e:
        raise UserError(str(e)) from None


def _seed(cfg: dict, args) -> int:
    return args.seed if getattr(args, "seed", None) is not None else cfg["seed"]


# IO ---------------------------------------------------------------------------

def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class Run:
    """Tracks inputs, outputs and timings of one subcommand for its manifest."""

    def __init__(self, command: str, settings: dict):
        self.command = command
        self.settings = settings
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.timing: dict[str, float] = {}
        self.extra: dict = {}
        self._t0 = time.perf_counter()

    def read(self, path: str) -> str:
        if path == "-":
            data = sys.stdin.buffer.read()
        else:
            try:
                data = Path(path).read_bytes()
            except FileNotFoundError:
                raise UserError(f"input file not found: {path}") from None
            except IsADirectoryError:
                raise UserError(f"input is a directory: {path}") from None
        self.inputs[path] = _sha256(data)
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DataError(f"{path}: not valid UTF-8 ({e})") from None

    def write(self, path: str, text: str) -> None:
        self.outputs[path] = _sha256(text.encode("utf-8"))
        if path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            parent = Path(path).parent
            if not parent.exists():
                raise UserError(f"output directory does not exist: {parent}")
            atomic_write_text(path, text)

    def stage(self, name: str, fn: Callable):
        t = time.perf_counter()
        out = fn()
        self.timing[name] = round(time.perf_counter() - t, 6)
        return out

    def manifest(self) -> dict:
        canonical = json.dumps(self.settings, sort_keys=True, ensure_ascii=False, default=str)
        return {
            "tool": "visotext",
            "version": __version__,
            "command": self.command,
            "config": self.settings,
            "config_sha256": _sha256(canonical.encode("utf-8")),
            "inputs": self.inputs,
            "outputs": self.outputs,
            "timing_seconds": {**self.timing, "total": round(time.perf_counter() - self._t0, 6)},
            **self.extra,
        }

    def finish(self, primary_out: str) -> None:
        if primary_out != "-":
            atomic_write_text(primary_out + ".manifest.json", json.dumps(self.manifest(), indent=2, ensure_ascii=False) + "\n")


def _corpus(run: Run, path: str, strict: bool = True) -> Corpus:
    text = run.read(path)
    try:
        return parse_corpus(io.StringIO(text), name=Path(path).stem if path != "-" else "stdin", source_name=path, strict=strict)
    except CorpusError as e:
        raise DataError(str(e)) from None


def _jsonl(run: Run, path: str) -> list[dict]:
    records = []
    for lineno, line in enumerate(run.read(path).splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise DataError(f"{path}:{lineno}: invalid JSON ({e.msg})") from None
        if not isinstance(rec, dict):
            raise DataError(f"{path}:{lineno}: record must be a JSON object")
        records.append(rec)
    return records


def _vocab(run: Run, path: str) -> UnigramVocab:
    text = run.read(path)
    try:
        return UnigramVocab.from_tsv(text)
    except VocabError as e:
        raise DataError(f"{path}: {e}") from None


def _lexicon(cls, path: Optional[str]):
    try:
        return cls.default() if path is None else cls.load(path)
    except FileNotFoundError:
        raise UserError(f"lexicon file not found: {path}") from None
    except ValueError as e:
        raise DataError(str(e)) from None


def _corpus_text(corpus: Corpus) -> str:
    return dump_jsonl(c.to_record() for c in corpus)


# Subcommands ------------------------------------------------------------------

def cmd_clean(args, cfg) -> int:
    values = _merged(cfg, "clean", {
        "spam_repeat_threshold": args.spam_threshold,
        "min_letter_ratio": args.min_letter_ratio,
        "strip_handles": args.strip_handles,
        "keep_emojis": None if args.remove_emojis is None else not args.remove_emojis,
    })
    ccfg = _build(CleaningConfig, values)
    run = Run("clean", {"clean": dataclasses.asdict(ccfg)})
    corpus = _corpus(run, args.input, strict=not args.skip_malformed)
    cleaned, stats = run.stage("clean", lambda: clean_corpus(corpus, ccfg))
    run.extra["stats"] = {**stats.to_dict(), "malformed": corpus.malformed}
    run.write(args.out, _corpus_text(cleaned))
    run.finish(args.out)
    print(json.dumps(run.extra["stats"]), file=sys.stderr)
    return EXIT_OK


def cmd_normalize(args, cfg) -> int:
    values = {**NORMALIZE_DEFAULTS, **_merged(cfg, "normalize", {
        "teencode": args.teencode,
        "teencode_lexicon": args.teencode_lexicon,
        "emoji": args.emoji,
        "emoji_lexicon": args.emoji_lexicon,
    })}
    if values["emoji"] not in ("keep", "expand", "remove"):
        raise UserError(f"normalize.emoji must be keep, expand or remove, got {values['emoji']!r}")
    teen = _lexicon(TeencodeLexicon, values["teencode_lexicon"]) if values["teencode"] else None
    emo = _lexicon(EmojiLexicon, values["emoji_lexicon"]) if values["emoji"] == "expand" else None
    run = Run("normalize", {"normalize": values})
    corpus = _corpus(run, args.input)

    def transform() -> Corpus:
        out = []
        for c in corpus:
            text = c.text
            if teen is not None:
                text = normalize_teencode(text, teen)
            if values["emoji"] == "expand":
                text = emojis_to_text(text, emo)
            elif values["emoji"] == "remove":
                text = remove_emojis(text)
            if c.spans is not None and len(text.split()) != len(c.words):
                raise DataError(
                    f"comment {c.id!r}: normalization changed the word count of a span-annotated comment; "
                    "use remap-spans for emoji in span data"
                )
            out.append(dataclasses.replace(c, text=text))
        return corpus.replace(out)

    result = run.stage("normalize", transform)
    run.write(args.out, _corpus_text(result))
    run.finish(args.out)
    return EXIT_OK


def cmd_perturb(args, cfg) -> int:
    values = _merged(cfg, "perturb", {"diacritics": args.diacritics})
    pct = values.get("diacritics", PERTURB_DEFAULTS["diacritics"])
    if pct not in VALID_PERCENTAGES:
        raise UserError(f"--diacritics must be one of {VALID_PERCENTAGES}, got {pct!r}")
    seed = _seed(cfg, args)
    run = Run("perturb", {"perturb": {"diacritics": pct}, "seed": seed})
    corpus = _corpus(run, args.input)

    def transform():
        out, plans = [], []
        for c in corpus:
            s = comment_seed(seed, c.id)
            text, plan = strip_partial(c.text, pct, s)
            out.append(dataclasses.replace(c, text=text))
            plans.append({"id": c.id, **plan.to_dict()})
        return corpus.replace(out), plans

    result, plans = run.stage("perturb", transform)
    run.write(args.out, _corpus_text(result))
    plan_path = args.plan or (None if args.out == "-" else args.out + ".plan.json")
    if plan_path:
        doc = {"percentage": pct, "seed": seed, "comments": plans}
        run.write(plan_path, json.dumps(doc, ensure_ascii=False, indent=1) + "\n")
    run.finish(args.out)
    return EXIT_OK


def cmd_train_tokenizer(args, cfg) -> int:
    values = _merged(cfg, "tokenizer", {
        "target_vocab_size": args.vocab_size,
        "character_coverage": args.coverage,
        "max_piece_length": args.max_piece_length,
        "seed_vocab_multiplier": args.seed_multiplier,
        "em_iterations_per_round": args.em_iterations,
        "prune_fraction": args.prune_fraction,
    })
    tcfg = _build(TrainerConfig, values)
    run = Run("train-tokenizer", {"tokenizer": dataclasses.asdict(tcfg)})
    corpus = _corpus(run, args.input)
    if len(corpus) == 0:
        raise DataError("cannot train a tokenizer on an empty corpus")
    trainer = UnigramTrainer(tcfg)
    try:
        vocab = run.stage("train", lambda: trainer.fit([c.text for c in corpus]))
    except ValueError as e:
        raise DataError(str(e)) from None
    run.extra["training"] = {"round_sizes": trainer.log.sizes, "log_likelihood": trainer.log.rounds}
    run.write(args.out, vocab.to_tsv())
    run.finish(args.out)
    return EXIT_OK


def cmd_encode(args, cfg) -> int:
    run = Run("encode", {"pieces_display": args.pieces_display})
    vocab = _vocab(run, args.vocab)
    corpus = _corpus(run, args.input)
    marker = args.pieces_display == "marker"
    lines = run.stage("encode", lambda: [vocab.encode(c.text).to_record(c.id, marker) for c in corpus])
    run.write(args.out, dump_jsonl(lines))
    run.finish(args.out)
    return EXIT_OK


def cmd_stats(args, cfg) -> int:
    run = Run("stats", {})
    vocab = _vocab(run, args.vocab)
    named = []
    for item in args.inputs:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise UserError(f"--inputs entries must look like name=path, got {item!r}")
        named.append((name, _corpus(run, path)))
    report = run.stage("stats", lambda: token_length_stats(vocab, named))
    run.write(args.out, json.dumps(report.to_dict(), ensure_ascii=False, indent=2) + "\n")
    run.finish(args.out)
    return EXIT_OK


def _encodings(records: list[dict], vocab: UnigramVocab, path: str) -> list[tuple[str, Encoding]]:
    out = []
    for n, rec in enumerate(records, start=1):
        ids = rec.get("ids")
        cid = rec.get("id")
        if not isinstance(cid, str) or not isinstance(ids, list) or not all(isinstance(i, int) for i in ids):
            raise DataError(f"{path}: record {n} needs a string 'id' and an integer list 'ids'")
        if any(not 0 <= i < vocab.vocab_size for i in ids):
            raise DataError(f"{path}: record {cid!r} has ids outside the vocabulary")
        pieces = [vocab.id_to_piece[i] for i in ids]
        out.append((cid, Encoding(ids, pieces, [(0, 0)] * len(ids))))
    return out


def _parse_rates(text: str) -> list[float]:
    try:
        return [float(r) for r in text.split(",") if r.strip()]
    except ValueError:
        raise UserError(f"--rates must be comma-separated numbers, got {text!r}") from None


def cmd_mask(args, cfg) -> int:
    values = _merged(cfg, "mask", {"rate": args.rate, "max_seq_len": args.max_seq_len})
    values["seed"] = _seed(cfg, args)
    mcfg = _build(MaskConfig, values)
    rates = _parse_rates(args.rates) if args.rates else None
    if rates is not None and (not rates or any(not 0.0 <= r <= 1.0 for r in rates)):
        raise UserError("--rates must list values in [0, 1]")
    if args.epochs < 1:
        raise UserError("--epochs must be >= 1")
    run = Run("mask", {"mask": dataclasses.asdict(mcfg), "epoch": args.epoch, "rates": rates, "epochs": args.epochs})
    vocab = _vocab(run, args.vocab)
    encoded = _encodings(_jsonl(run, args.input), vocab, args.input)
    if rates is None:
        recs = run.stage("mask", lambda: [
            plan_masks(enc, vocab, mcfg, epoch_nonce=args.epoch, comment_id=cid).to_record() for cid, enc in encoded
        ])
    else:
        rows = run.stage("sweep", lambda: sweep_rates(encoded, vocab, rates, mcfg, epochs=args.epochs, keep_plans=True))
        recs = [{"rate": r.rate, **p.to_record()} for r in rows for p in r.plans]
        run.extra["sweep"] = [r.to_dict() for r in rows]
        print(json.dumps(run.extra["sweep"]), file=sys.stderr)
    run.write(args.out, dump_jsonl(recs))
    run.finish(args.out)
    return EXIT_OK


def cmd_remap_spans(args, cfg) -> int:
    lex = _lexicon(EmojiLexicon, args.lexicon)
    run = Run("remap-spans", {"delete": args.delete, "lexicon": args.lexicon})
    corpus = _corpus(run, args.input)
    opts = RemapOptions(delete=args.delete)
    try:
        result = run.stage("remap", lambda: corpus.replace([remap_comment(c, lex, opts) for c in corpus]))
    except ValueError as e:
        raise DataError(str(e)) from None
    run.write(args.out, _corpus_text(result))
    run.finish(args.out)
    return EXIT_OK


def _aligned(gold: Corpus, pred: Corpus, what: str) -> list[tuple[Comment, Comment]]:
    by_id = {c.id: c for c in pred}
    missing = [c.id for c in gold if c.id not in by_id]
    if missing or len(by_id) != len(gold):
        raise DataError(f"{what} ids do not match the gold ids (e.g. {missing[:3]})")
    return [(g, by_id[g.id]) for g in gold]


def _per_example(task: str, pairs: list[tuple[Comment, Comment]]) -> list[float]:
    if task == "classification":
        return [float(g.label == p.label) for g, p in pairs]
    out = []
    for g, p in pairs:
        gt, pt = g.tags(), p.tags()
        out.append(sum(a == b for a, b in zip(gt, pt)) / len(gt) if gt else 1.0)
    return out


def _report(task: str, pairs: list[tuple[Comment, Comment]]):
    if task == "classification":
        if any(g.label is None or p.label is None for g, p in pairs):
            raise DataError("classification evaluation needs a 'label' on every record")
        return classification_report([g.label for g, _ in pairs], [p.label for _, p in pairs])
    if any(g.spans is None for g, _ in pairs):
        raise DataError("span evaluation needs 'spans' on every gold record")
    return span_report(
        [SpanLabeledSeq.from_comment(g) for g, _ in pairs],
        [SpanLabeledSeq(tuple(p.words), tuple(p.tags())) for _, p in pairs],
    )


def cmd_evaluate(args, cfg) -> int:
    run = Run("evaluate", {"task": args.task, "alpha": args.alpha})
    gold = _corpus(run, args.gold)
    pairs = _aligned(gold, _corpus(run, args.pred), "prediction")
    try:
        out: dict = {"report": _report(args.task, pairs).to_dict()}
        if args.compare:
            other = _aligned(gold, _corpus(run, args.compare), "comparison")
            other_report = _report(args.task, other)
            out["compare_report"] = other_report.to_dict()
            # Pairs are per-example scores: 0/1 correctness, or tag accuracy per comment for spans.
            test = paired_t_test(_per_example(args.task, pairs), _per_example(args.task, other), args.alpha)
            out["paired_t_test"] = test.to_dict()
    except ValueError as e:
        raise DataError(str(e)) from None
    run.write(args.out, json.dumps(out, ensure_ascii=False, indent=2) + "\n")
    run.finish(args.out)
    return EXIT_OK


# Parser -----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USER, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, io_: bool = True) -> None:
    p.add_argument("--config", help="TOML pipeline config")
    p.add_argument("--seed", type=int, help="overrides the config seed")
    if io_:
        p.add_argument("--input", required=True, help="JSON Lines input, '-' for stdin")
        p.add_argument("--out", default="-", help="output path, '-' for stdout (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="visotext", description="Vietnamese social-media text pipeline")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("clean", help="drop links, handle-only, spam and noncanonical comments")
    _common(p)
    p.add_argument("--spam-threshold", type=int, dest="spam_threshold")
    p.add_argument("--min-letter-ratio", type=float)
    p.add_argument("--strip-handles", action="store_true", default=None)
    p.add_argument("--remove-emojis", action="store_true", default=None)
    p.add_argument("--skip-malformed", action="store_true", help="skip unparseable lines instead of failing")
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("normalize", help="standardize teencode and convert or remove emoji")
    _common(p)
    p.add_argument("--teencode", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--teencode-lexicon")
    p.add_argument("--emoji", choices=("keep", "expand", "remove"))
    p.add_argument("--emoji-lexicon")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("perturb", help="strip diacritics from a share of words")
    _common(p)
    p.add_argument("--diacritics", type=int, choices=VALID_PERCENTAGES)
    p.add_argument("--plan", help="plan sidecar path (default: <out>.plan.json)")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("train-tokenizer", help="train a unigram subword vocabulary")
    _common(p)
    p.add_argument("--vocab-size", type=int, dest="vocab_size")
    p.add_argument("--coverage", type=float)
    p.add_argument("--max-piece-length", type=int)
    p.add_argument("--seed-multiplier", type=int)
    p.add_argument("--em-iterations", type=int)
    p.add_argument("--prune-fraction", type=float)
    p.set_defaults(func=cmd_train_tokenizer)

    p = sub.add_parser("encode", help="encode a corpus with a trained vocabulary")
    _common(p)
    p.add_argument("--vocab", required=True)
    p.add_argument("--pieces-display", choices=("marker", "plain"), default="marker")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("stats", help="tokens-per-comment statistics")
    _common(p, io_=False)
    p.add_argument("--vocab", required=True)
    p.add_argument("--inputs", nargs="+", required=True, metavar="NAME=PATH")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("mask", help="dynamic masked-LM corruption plans")
    _common(p)
    p.add_argument("--vocab", required=True)
    p.add_argument("--rate", type=float)
    p.add_argument("--epoch", type=int, default=0)
    p.add_argument("--max-seq-len", type=int)
    p.add_argument("--rates", help="comma-separated rates for a sweep, e.g. 0.1,0.2,0.3")
    p.add_argument("--epochs", type=int, default=1, help="epochs per rate in a sweep")
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("remap-spans", help="expand or delete emoji while carrying span labels")
    _common(p)
    p.add_argument("--lexicon", help="emoji TSV (default: bundled lexicon)")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--delete", dest="delete", action="store_true")
    mode.add_argument("--expand", dest="delete", action="store_false")
    p.set_defaults(func=cmd_remap_spans)

    p = sub.add_parser("evaluate", help="accuracy, weighted and macro F1, paired t-test")
    _common(p, io_=False)
    p.add_argument("--task", choices=("classification", "spans"), required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--compare", help="second system's predictions for a paired t-test")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # Usage errors exit 1, --help and --version exit 0.
        return e.code if isinstance(e.code, int) else EXIT_USER
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except UserError as e:
        print(f"visotext {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USER
    except (DataError, ValueError) as e:
        # ValueErrors past config parsing come from record contents.
        print(f"visotext {args.command}: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"visotext {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
