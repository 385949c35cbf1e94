"""Preprocessing, subword tokenization and evaluation tools for Vietnamese social-media text."""

__version__ = "0.1.0"

from .corpus import Comment, Corpus, CorpusError, load_corpus, save_corpus
from .diacritics import strip_all_diacritics, strip_partial
from .masking import MaskConfig, MaskPlan, plan_masks, sweep_rates
from .metrics import EvalReport, PairedTestResult, classification_report, paired_t_test, span_report
from .normalize import CleaningConfig, EmojiLexicon, TeencodeLexicon, clean_corpus, normalize_teencode
from .spans import RemapOptions, SpanLabeledSeq, remap_spans, remap_spans_oracle
from .tokenizer import Encoding, UnigramVocab, token_length_stats
from .trainer import TrainerConfig, train

__all__ = [
    "CleaningConfig", "Comment", "Corpus", "CorpusError", "EmojiLexicon", "Encoding", "EvalReport",
    "MaskConfig", "MaskPlan", "PairedTestResult", "RemapOptions", "SpanLabeledSeq", "TeencodeLexicon",
    "TrainerConfig", "UnigramVocab", "classification_report", "clean_corpus", "load_corpus",
    "normalize_teencode", "paired_t_test", "plan_masks", "remap_spans", "remap_spans_oracle",
    "save_corpus", "span_report", "strip_all_diacritics", "strip_partial", "sweep_rates",
    "token_length_stats", "train",
]
