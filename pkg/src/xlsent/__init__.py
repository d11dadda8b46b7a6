"""Bilingual sentiment embeddings for cross-lingual sentiment classification."""

from .blse import BlseParams, TrainConfig, TrainHistory, init_params, train, train_no_mprime, train_no_projection
from .corpus import BINARY, FOUR_CLASS, THREE_CLASS, LabelSchema, LabeledSentence, TargetedInstance
from .embeddings import EmbeddingSpace, load_embeddings, save_embeddings
from .evaluation import EvalReport, approx_randomization, evaluate
from .lexicon import BilingualLexicon, load_lexicon, split_dev
from .targeted import TargetedParams, train_targeted

__version__ = "0.1.0"
