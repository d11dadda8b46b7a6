"""Command-line front end.

Exit codes: 0 success, 1 invalid flags or inputs, 2 runtime failure.
Set ``XLSENT_LOG`` to ``error``, ``info`` or ``debug`` for log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, baselines, blse, synthetic, targeted
from .checkpoint import atomic_write_text, read_checkpoint
from .corpus import (LabeledSentence, TargetedInstance, dump_corpus, get_schema, map_labels,
                     read_corpus, to_sentence_level)
from .embeddings import read_embeddings, save_embeddings
from .errors import ArgumentError, FormatError, XlsentError
from .evaluation import DEFAULT_ROUNDS, approx_randomization, evaluate
from .lexicon import read_lexicon, save_lexicon, split_dev

log = logging.getLogger("xlsent")

SENTENCE_MODES = {"sentence": "blse", "no-mprime": "no_mprime", "no-proj": "no_projection"}
TARGETED_MODES = {"split": "split", "target-only": "target_only", "context-only": "context_only",
                  "sent": "sent"}
MODES = tuple(SENTENCE_MODES) + tuple(TARGETED_MODES)


class ValidationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


# shared helpers -----------------------------------------------------------

TRAIN_DEFAULTS = dict(alpha=0.3, epochs=300, batch_size=20, lr=0.001, seed=0, schema="binary",
                      dev_fraction=0.1, init="uniform", dev_eval_every=1)


def _merge_config(args, defaults: dict) -> None:
    """Fill unset flags from ``--config`` JSON, then from ``defaults``."""
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ValidationError(f"--config: file not found: {path}")
        try:
            cfg = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"--config: invalid JSON: {exc}") from None
        for key, value in cfg.items():
            attr = key.lstrip("-").replace("-", "_")
            if not hasattr(args, attr):
                raise ValidationError(f"--config: unknown option {key!r}")
            if getattr(args, attr) in (None, False):
                setattr(args, attr, value)
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name, None) is None:
            raise ValidationError(f"missing required flag {_flag(name)}")


def _paths_exist(args, *names) -> None:
    for name in names:
        value = getattr(args, name, None)
        if value is not None and not Path(value).exists():
            raise ValidationError(f"{_flag(name)}: file not found: {value}")


def _check_range(args, name, lo=None, hi=None, lo_open=False) -> None:
    v = getattr(args, name)
    if v is None:
        return
    if (lo is not None and (v < lo or (lo_open and v == lo))) or (hi is not None and v > hi):
        raise ValidationError(f"{_flag(name)}={v} out of range")


def _write_json(obj, out) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _render(fn, *args, **kwargs) -> str:
    buf = io.StringIO()
    fn(*args, buf, **kwargs)
    return buf.getvalue()


def _lower(corpus):
    out = []
    for inst in corpus:
        toks = tuple(t.lower() for t in inst.tokens)
        if isinstance(inst, TargetedInstance):
            out.append(TargetedInstance(toks, inst.label, inst.target_start, inst.target_end, inst.sid))
        else:
            out.append(LabeledSentence(toks, inst.label))
    return out


def _read_tokens(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [tok for line in fh for tok in line.split()]


def _read_lines(path) -> list[list[str]]:
    with open(path, encoding="utf-8") as fh:
        return [line.split() for line in fh]


def _load_model(path):
    with open(path, encoding="utf-8") as fh:
        kind, meta, mats = read_checkpoint(fh)
    if kind == "blse":
        return blse.BlseParams.from_checkpoint(meta, mats), meta
    if kind == "targeted":
        return targeted.TargetedParams.from_checkpoint(meta, mats), meta
    if kind == "mapping":
        return baselines.MappingMatrix(mats["W"], float(meta.get("residual", "nan")),
                                       int(meta.get("pairs", 0))), meta
    raise FormatError(f"unknown checkpoint kind {kind!r}")


def _derived_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


# train --------------------------------------------------------------------

def _add_train_flags(p):
    p.add_argument("--config", help="JSON file with flag values; explicit flags win")
    p.add_argument("--src-emb")
    p.add_argument("--trg-emb")
    p.add_argument("--lexicon", help="training lexicon TSV")
    p.add_argument("--dev-lexicon", help="dev lexicon TSV (default: split off --dev-fraction)")
    p.add_argument("--dev-fraction", type=float)
    p.add_argument("--train-corpus")
    p.add_argument("--src-dev")
    p.add_argument("--trg-dev")
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--schema", help="binary, 3class, 4class or comma-separated label names")
    p.add_argument("--label-mode", choices=("binary", "multiclass"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--hidden", type=int, help="joint space dimension (default: source dim)")
    p.add_argument("--init", choices=("uniform", "identity"))
    p.add_argument("--dev-eval-every", type=int)
    p.add_argument("--emb-limit", type=int, help="read only the first N embeddings")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--dedup-lexicon", action="store_true")
    p.add_argument("--drop-mixed", action="store_true")
    p.add_argument("--out", help="output directory")


def _validate_train(args):
    _merge_config(args, TRAIN_DEFAULTS)
    _require(args, "src_emb", "trg_emb", "lexicon", "train_corpus", "mode", "out")
    if args.mode not in MODES:
        raise ValidationError(f"--mode must be one of {', '.join(MODES)}")
    _paths_exist(args, "src_emb", "trg_emb", "lexicon", "dev_lexicon", "train_corpus", "src_dev",
                 "trg_dev")
    _check_range(args, "alpha", 0.0, 1.0)
    _check_range(args, "epochs", 1)
    _check_range(args, "batch_size", 1)
    _check_range(args, "lr", 0.0, lo_open=True)
    _check_range(args, "dev_fraction", 0.0, 1.0, lo_open=True)
    _check_range(args, "hidden", 1)
    _check_range(args, "emb_limit", 1)
    _check_range(args, "dev_eval_every", 1)


def _config_from(args) -> blse.TrainConfig:
    return blse.TrainConfig(alpha=args.alpha, epochs=args.epochs, batch_size=args.batch_size,
                            learning_rate=args.lr, seed=args.seed, hidden=args.hidden,
                            init=args.init, dev_eval_every=args.dev_eval_every)


def _load_training_data(args):
    schema = get_schema(args.schema)
    src = read_embeddings(args.src_emb, args.emb_limit)
    trg = read_embeddings(args.trg_emb, args.emb_limit)
    lexicon = read_lexicon(args.lexicon)
    if args.dedup_lexicon:
        lexicon = lexicon.deduplicated()
    if args.dev_lexicon:
        lex_train, lex_dev = lexicon, read_lexicon(args.dev_lexicon)
    else:
        lex_train, lex_dev = split_dev(lexicon, args.dev_fraction, args.seed)

    def corpus(path):
        if path is None:
            return None
        data = read_corpus(path, schema, args.drop_mixed)
        return _lower(data) if args.lowercase else data

    train, src_dev, trg_dev = corpus(args.train_corpus), corpus(args.src_dev), corpus(args.trg_dev)
    if args.label_mode:
        new_schema = schema
        mapped = []
        for data in (train, src_dev, trg_dev):
            if data is None:
                mapped.append(None)
            else:
                data, new_schema = map_labels(data, schema, args.label_mode)
                mapped.append(data)
        (train, src_dev, trg_dev), schema = mapped, new_schema
    if not train:
        raise ValidationError("--train-corpus contains no usable instances")
    return dict(src=src, trg=trg, lex_train=lex_train, lex_dev=lex_dev, train=train,
                src_dev=src_dev, trg_dev=trg_dev, schema=schema)


def _sentences(corpus):
    if corpus is None:
        return None
    if all(isinstance(i, TargetedInstance) and i.sid is not None for i in corpus):
        return to_sentence_level(corpus)
    return [LabeledSentence(i.tokens, i.label) for i in corpus]


def _targeted_only(corpus, flag):
    if corpus is None:
        return None
    if any(i.is_sentence_level for i in corpus):
        raise ValidationError(f"{flag}: targeted modes need a 'target' span on every instance")
    return corpus


def _fit(mode: str, config: blse.TrainConfig, data: dict, lexicon):
    o = data["schema"].arity
    if mode in SENTENCE_MODES:
        variant = SENTENCE_MODES[mode]
        if variant == "no_mprime" and data["src"].dim != data["trg"].dim:
            raise ValidationError("--mode no-mprime needs embeddings of equal dimension")
        return blse.train(config, data["src"], data["trg"], _sentences(data["train"]), lexicon,
                          data["lex_dev"], _sentences(data["src_dev"]), _sentences(data["trg_dev"]),
                          n_labels=o, variant=variant)
    variant = TARGETED_MODES[mode]
    if variant == "sent":
        return targeted.train_targeted(config, data["src"], data["trg"], data["train"], lexicon,
                                       data["lex_dev"], _sentences(data["src_dev"]),
                                       _sentences(data["trg_dev"]), variant="sent", n_labels=o)
    return targeted.train_targeted(
        config, data["src"], data["trg"], _targeted_only(data["train"], "--train-corpus"), lexicon,
        data["lex_dev"], _targeted_only(data["src_dev"], "--src-dev"),
        _targeted_only(data["trg_dev"], "--trg-dev"), variant=variant, n_labels=o)


def _save_run(out_dir: Path, mode: str, params, history, schema, seed: int) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out_dir / "model.ckpt",
                      _render(params.save, mode=mode, labels=",".join(schema.names), seed=seed))
    atomic_write_text(out_dir / "history.csv", _render(history.to_csv))
    last = history[-1]
    return _finite_or_none({"mode": mode, "seed": seed, "epochs": len(history), "J": last.J,
                            "H": last.H, "MSE": last.MSE, "dev_pair_cosine": last.dev_pair_cosine,
                            "src_f1": last.src_f1, "tgt_f1": last.tgt_f1})


def _finite_or_none(d: dict) -> dict:
    """JSON has no NaN; metrics that were never computed become null."""
    return {k: None if isinstance(v, float) and v != v else v for k, v in d.items()}


def cmd_train(args) -> int:
    _validate_train(args)
    config = _config_from(args)
    data = _load_training_data(args)
    params, history = _fit(args.mode, config, data, data["lex_train"])
    metrics = _save_run(Path(args.out), args.mode, params, history, data["schema"], args.seed)
    log.info("trained %s for %d epochs: %s", args.mode, len(history), metrics)
    return 0


# sweep --------------------------------------------------------------------

def _parse_grid(spec: str):
    name, sep, values = spec.partition("=")
    name = name.strip()
    if not sep or name not in ("alpha", "lexicon"):
        raise ValidationError("--grid must look like 'alpha=0,0.5,1' or 'lexicon=100,300'")
    items = [v.strip() for v in values.split(",") if v.strip()]
    if not items:
        raise ValidationError("--grid has no values")
    try:
        parsed = [float(v) for v in items] if name == "alpha" else [int(v) for v in items]
    except ValueError:
        raise ValidationError(f"--grid: bad value in {values!r}") from None
    if name == "alpha" and any(not 0 <= v <= 1 for v in parsed):
        raise ValidationError("--grid: alpha values must be in [0, 1]")
    if name == "lexicon" and any(v < 0 for v in parsed):
        raise ValidationError("--grid: lexicon sizes must be >= 0")
    return name, parsed


def cmd_sweep(args) -> int:
    _validate_train(args)
    _require(args, "grid")
    name, values = _parse_grid(args.grid)
    if args.workers < 1:
        raise ValidationError("--workers must be >= 1")
    base = _config_from(args)
    data = _load_training_data(args)
    out = Path(args.out)

    def run(index_value):
        index, value = index_value
        seed = _derived_seed(args.seed, index)
        config = replace(base, seed=seed)
        lexicon = data["lex_train"]
        if name == "alpha":
            config = replace(config, alpha=value)
        else:
            lexicon = lexicon.head(value) if value > 0 else None
        label = f"{name}={value}"
        row = {"point": label, "param": name, "value": value, "seed": seed}
        try:
            params, history = _fit(args.mode, config, data, lexicon)
            metrics = _save_run(out / label, args.mode, params, history, data["schema"], seed)
            atomic_write_text(out / label / "metrics.json",
                              json.dumps(metrics, indent=2, sort_keys=True) + "\n")
            row.update(status="ok", error="", **{k: "" if metrics[k] is None else metrics[k]
                                                  for k in ("dev_pair_cosine", "src_f1", "tgt_f1")})
        except Exception as exc:  # recorded per point; the sweep carries on
            log.error("sweep point %s failed: %s", label, exc)
            row.update(status="failed", dev_pair_cosine="", src_f1="", tgt_f1="", error=str(exc))
        return row

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        rows = list(pool.map(run, enumerate(values)))
    buf = io.StringIO()
    fields = ["point", "param", "value", "status", "seed", "dev_pair_cosine", "src_f1", "tgt_f1", "error"]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    atomic_write_text(out / "summary.csv", buf.getvalue())
    return 0 if all(r["status"] == "ok" for r in rows) else 2


# predict / eval -----------------------------------------------------------

def cmd_predict(args) -> int:
    _merge_config(args, {"side": "target"})
    _require(args, "model", "emb", "corpus", "out")
    _paths_exist(args, "model", "emb", "corpus")
    model, meta = _load_model(args.model)
    schema = get_schema(args.schema or meta.get("labels") or "binary")
    space = read_embeddings(args.emb)
    corpus = read_corpus(args.corpus, schema)
    if args.lowercase:
        corpus = _lower(corpus)
    if isinstance(model, targeted.TargetedParams):
        preds = targeted.predict_targeted(model, space, _targeted_only(corpus, "--corpus"), args.side)
    elif isinstance(model, blse.BlseParams):
        if meta.get("mode") == "sent" and all(i.sid is not None for i in corpus):
            preds = targeted.sent_baseline(model, space, corpus, args.side)
        else:
            preds = blse.predict_batch(model, space, corpus, args.side)
    else:
        raise ValidationError("--model must be a blse or targeted checkpoint")
    text = "".join(json.dumps({"label": schema.names[p]}) + "\n" for p in preds)
    atomic_write_text(args.out, text)
    return 0


def _read_predictions(path, schema) -> list[int]:
    labels = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}: invalid JSON: {exc.msg}", lineno) from None
            name = rec.get("label") if isinstance(rec, dict) else rec
            if name not in schema.names:
                raise FormatError(f"{path}: unknown label {name!r}", lineno)
            labels.append(schema.index(name))
    return labels


def cmd_eval(args) -> int:
    _merge_config(args, {"schema": "binary", "rounds": DEFAULT_ROUNDS, "seed": 0})
    _require(args, "gold", "pred")
    _paths_exist(args, "gold", "pred", "compare")
    _check_range(args, "rounds", 1)
    schema = get_schema(args.schema)
    gold = [i.label for i in read_corpus(args.gold, schema)]
    pred = _read_predictions(args.pred, schema)
    if len(gold) != len(pred):
        raise ValidationError(f"--pred has {len(pred)} lines but --gold has {len(gold)}")
    report = evaluate(gold, pred, schema.arity, schema.names)
    result = report.to_dict()
    if args.compare:
        other = _read_predictions(args.compare, schema)
        if len(other) != len(gold):
            raise ValidationError(f"--compare has {len(other)} lines but --gold has {len(gold)}")
        result["compare_macro_f1"] = evaluate(gold, other, schema.arity).macro_f1
        result["p_value"] = approx_randomization(gold, pred, other, args.rounds, args.seed, schema.arity)
        result["rounds"] = args.rounds
    _write_json(result, args.out)
    return 0


# baselines ----------------------------------------------------------------

def cmd_map_fit(args) -> int:
    _require(args, "src_emb", "trg_emb", "lexicon", "out")
    _paths_exist(args, "src_emb", "trg_emb", "lexicon")
    src, trg = read_embeddings(args.src_emb), read_embeddings(args.trg_emb)
    mapping = baselines.fit_mapping(src, trg, read_lexicon(args.lexicon), args.orthogonal)
    atomic_write_text(args.out, _render(mapping.save))
    _write_json({"residual": mapping.fit_residual, "pairs_used": mapping.pairs_used,
                 "pairs_skipped": mapping.pairs_skipped}, args.summary)
    return 0


def cmd_csls(args) -> int:
    _require(args, "src_emb", "trg_emb", "mapping", "queries", "out")
    _paths_exist(args, "src_emb", "trg_emb", "mapping", "queries")
    if args.k < 1 or args.top < 1:
        raise ValidationError("--k and --top must be >= 1")
    src, trg = read_embeddings(args.src_emb), read_embeddings(args.trg_emb)
    mapping, _ = _load_model(args.mapping)
    gold: dict[str, set[str]] = {}
    for s, t in read_lexicon(args.queries):
        if s in src:
            gold.setdefault(s, set()).add(t)
    queries = list(gold)
    if not queries:
        raise ValidationError("--queries: no query word is in the source vocabulary")
    if args.k > len(trg):
        raise ValidationError(f"--k={args.k} exceeds the target vocabulary size {len(trg)}")
    Q = mapping.project_source(src.matrix[[src.index[w] for w in queries]])
    pool = mapping.project_source(src.matrix)
    ranked, scores = baselines.csls_retrieve(Q, trg.matrix, args.k, top=args.top, source_pool=pool)
    lines = []
    for qi, word in enumerate(queries):
        for r, (c, sc) in enumerate(zip(ranked[qi], scores[qi]), start=1):
            lines.append(f"{word}\t{r}\t{trg.words[c]}\t{float(sc)!r}\n")
    atomic_write_text(args.out, "".join(lines))
    hits = sum(trg.words[ranked[i, 0]] in gold[w] for i, w in enumerate(queries))
    _write_json({"queries": len(queries), "k": args.k, "p_at_1": hits / len(queries)}, args.summary)
    return 0


def cmd_barista(args) -> int:
    _require(args, "src_corpus", "trg_corpus", "lexicon", "out")
    _paths_exist(args, "src_corpus", "trg_corpus", "lexicon")
    if not 0.0 <= args.p <= 1.0:
        raise ValidationError("--p must be in [0, 1]")
    lines = baselines.barista_corpus(_read_lines(args.src_corpus), _read_lines(args.trg_corpus),
                                     read_lexicon(args.lexicon), args.p, args.seed)
    atomic_write_text(args.out, "".join(" ".join(line) + "\n" for line in lines))
    return 0


def cmd_linear_clf(args) -> int:
    _require(args, "src_emb", "trg_emb", "mapping", "train_corpus", "test_corpus", "out")
    _paths_exist(args, "src_emb", "trg_emb", "mapping", "train_corpus", "test_corpus")
    schema = get_schema(args.schema)
    src, trg = read_embeddings(args.src_emb), read_embeddings(args.trg_emb)
    mapping, _ = _load_model(args.mapping)
    train = read_corpus(args.train_corpus, schema)
    test = read_corpus(args.test_corpus, schema)
    X, y, _ = blse.featurize(src, train)
    Xt, yt, _ = blse.featurize(trg, test)
    model = baselines.linear_classifier_fit(mapping.project_source(X), y, schema.arity, l2=args.l2,
                                            seed=args.seed)
    preds = model.predict(mapping.project_target(Xt))
    atomic_write_text(args.out, "".join(json.dumps({"label": schema.names[p]}) + "\n" for p in preds))
    _write_json(evaluate(yt, preds, schema.arity, schema.names).to_dict(), args.summary)
    return 0


# analyses -----------------------------------------------------------------

def cmd_pair_cosine(args) -> int:
    _require(args, "model", "src_emb", "trg_emb", "lexicon")
    _paths_exist(args, "model", "src_emb", "trg_emb", "lexicon")
    model, _ = _load_model(args.model)
    mean, used, skipped = analysis.pair_cosine(model, read_embeddings(args.src_emb),
                                               read_embeddings(args.trg_emb), read_lexicon(args.lexicon))
    _write_json({"mean_cosine": mean, "pairs": used, "skipped": skipped}, args.out)
    return 0


def cmd_synant(args) -> int:
    _require(args, "model", "emb", "positive", "negative")
    _paths_exist(args, "model", "emb", "positive", "negative")
    model, _ = _load_model(args.model)
    within, cross = analysis.synonym_antonym_separation(
        model, read_embeddings(args.emb), _read_tokens(args.positive), _read_tokens(args.negative),
        args.side)
    _write_json({"within": within, "cross": cross, "side": args.side}, args.out)
    return 0


def cmd_lang_sim(args) -> int:
    _require(args, "a_pos", "a_text", "b_pos", "b_text")
    _paths_exist(args, "a_pos", "a_text", "b_pos", "b_text")
    if args.n < 1:
        raise ValidationError("--n must be >= 1")

    def profiles(pos_path, text_path):
        with open(pos_path, encoding="utf-8") as fh:
            pos = analysis.profile_lines(fh, args.n)
        with open(text_path, encoding="utf-8") as fh:
            chars = analysis.profile_lines(fh, args.n, chars=True)
        return pos, chars

    a, b = profiles(args.a_pos, args.a_text), profiles(args.b_pos, args.b_text)
    _write_json({"similarity": analysis.language_similarity(*a, *b), "n": args.n}, args.out)
    return 0


def cmd_domain_div(args) -> int:
    _require(args, "a", "b")
    _paths_exist(args, "a", "b")
    if args.top < 1 or not args.smoothing > 0:
        raise ValidationError("--top must be >= 1 and --smoothing > 0")
    a, b = _read_lines(args.a), _read_lines(args.b)
    vocab = analysis.common_top_unigrams([a, b], args.top)
    div = analysis.domain_divergence(a, b, args.top, args.smoothing)
    _write_json({"divergence": div, "vocabulary": len(vocab), "smoothing": args.smoothing}, args.out)
    return 0


def cmd_export_proj(args) -> int:
    _require(args, "model", "emb", "out")
    _paths_exist(args, "model", "emb", "tokens")
    model, _ = _load_model(args.model)
    space = read_embeddings(args.emb)
    tokens = _read_tokens(args.tokens) if args.tokens else list(space.words)
    atomic_write_text(args.out, _render(lambda s: analysis.export_projected(model, space, tokens,
                                                                            args.side, s)))
    return 0


# synthetic data -----------------------------------------------------------

def cmd_synth(args) -> int:
    _require(args, "out")
    out = Path(args.out)
    task = (synthetic.targeted_task(args.seed) if args.targeted else synthetic.rotation_task(args.seed))
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "src.vec", _render(save_embeddings, task.src, precision=17))
    atomic_write_text(out / "trg.vec", _render(save_embeddings, task.trg, precision=17))
    atomic_write_text(out / "lexicon.train.tsv", _render(save_lexicon, task.lexicon_train))
    atomic_write_text(out / "lexicon.dev.tsv", _render(save_lexicon, task.lexicon_dev))
    schema = get_schema("binary")
    for name, data in (("train", task.train), ("src_dev", task.src_dev), ("trg_test", task.trg_test)):
        atomic_write_text(out / f"{name}.jsonl", _render(dump_corpus, data, schema))
    for name, words in (("src_positive", task.src_positive), ("src_negative", task.src_negative),
                        ("trg_positive", task.trg_positive), ("trg_negative", task.trg_negative)):
        atomic_write_text(out / f"{name}.txt", "\n".join(words) + "\n")
    return 0


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xlsent", description="Bilingual sentiment embeddings toolkit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("train", help="train a sentence-level or targeted model")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="train once per alpha or lexicon-size grid point")
    _add_train_flags(p)
    p.add_argument("--grid", help="'alpha=0,0.5,1' or 'lexicon=100,300'")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("predict", help="write JSONL label predictions")
    p.add_argument("--config")
    p.add_argument("--model")
    p.add_argument("--emb", help="embeddings of the corpus language")
    p.add_argument("--corpus")
    p.add_argument("--side", choices=("source", "target"))
    p.add_argument("--schema")
    p.add_argument("--lowercase", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="macro F1 report, optionally with a significance test")
    p.add_argument("--config")
    p.add_argument("--gold")
    p.add_argument("--pred")
    p.add_argument("--compare", help="second prediction file for approximate randomization")
    p.add_argument("--schema")
    p.add_argument("--rounds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baseline", help="projection baselines")
    bsub = p.add_subparsers(dest="baseline", metavar="BASELINE")
    b = bsub.add_parser("map-fit", help="least-squares embedding mapping")
    b.add_argument("--src-emb")
    b.add_argument("--trg-emb")
    b.add_argument("--lexicon")
    b.add_argument("--orthogonal", action="store_true")
    b.add_argument("--out")
    b.add_argument("--summary")
    b.set_defaults(func=cmd_map_fit)
    b = bsub.add_parser("csls", help="CSLS retrieval with a fitted mapping")
    b.add_argument("--src-emb")
    b.add_argument("--trg-emb")
    b.add_argument("--mapping")
    b.add_argument("--queries", help="gold lexicon TSV of query words")
    b.add_argument("--k", type=int, default=baselines.DEFAULT_K)
    b.add_argument("--top", type=int, default=10)
    b.add_argument("--out")
    b.add_argument("--summary")
    b.set_defaults(func=cmd_csls)
    b = bsub.add_parser("barista", help="pseudo-bilingual corpus")
    b.add_argument("--src-corpus")
    b.add_argument("--trg-corpus")
    b.add_argument("--lexicon")
    b.add_argument("--p", type=float, default=0.5)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_barista)
    b = bsub.add_parser("linear-clf", help="linear classifier over mapped averaged embeddings")
    b.add_argument("--src-emb")
    b.add_argument("--trg-emb")
    b.add_argument("--mapping")
    b.add_argument("--train-corpus")
    b.add_argument("--test-corpus")
    b.add_argument("--schema", default="binary")
    b.add_argument("--l2", type=float, default=1e-4)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--summary")
    b.set_defaults(func=cmd_linear_clf)

    p = sub.add_parser("analyze", help="diagnostic analyses")
    asub = p.add_subparsers(dest="analysis", metavar="ANALYSIS")
    a = asub.add_parser("pair-cosine", help="mean cosine of projected translation pairs")
    a.add_argument("--model")
    a.add_argument("--src-emb")
    a.add_argument("--trg-emb")
    a.add_argument("--lexicon")
    a.add_argument("--out")
    a.set_defaults(func=cmd_pair_cosine)
    a = asub.add_parser("synant", help="sentiment synonym/antonym cosines")
    a.add_argument("--model")
    a.add_argument("--emb")
    a.add_argument("--positive")
    a.add_argument("--negative")
    a.add_argument("--side", choices=("source", "target"), default="source")
    a.add_argument("--out")
    a.set_defaults(func=cmd_synant)
    a = asub.add_parser("lang-sim", help="POS + character trigram language similarity")
    a.add_argument("--a-pos")
    a.add_argument("--a-text")
    a.add_argument("--b-pos")
    a.add_argument("--b-text")
    a.add_argument("--n", type=int, default=3)
    a.add_argument("--out")
    a.set_defaults(func=cmd_lang_sim)
    a = asub.add_parser("domain-div", help="symmetrised KL over shared frequent unigrams")
    a.add_argument("--a")
    a.add_argument("--b")
    a.add_argument("--top", type=int, default=10_000)
    a.add_argument("--smoothing", type=float, default=1e-6)
    a.add_argument("--out")
    a.set_defaults(func=cmd_domain_div)
    a = asub.add_parser("export-proj", help="write projected vectors in word2vec text format")
    a.add_argument("--model")
    a.add_argument("--emb")
    a.add_argument("--tokens", help="whitespace-separated token file (default: whole vocabulary)")
    a.add_argument("--side", choices=("source", "target"), default="target")
    a.add_argument("--out")
    a.set_defaults(func=cmd_export_proj)

    p = sub.add_parser("synth", help="write a synthetic rotation task to a directory")
    p.add_argument("--out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--targeted", action="store_true")
    p.set_defaults(func=cmd_synth)
    return parser


def _setup_logging() -> None:
    level = os.environ.get("XLSENT_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    logging.basicConfig(level=levels.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_usage(sys.stderr)
            raise ValidationError("no command given")
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, ArgumentError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except XlsentError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # anything unexpected is a runtime failure
        log.debug("unhandled error", exc_info=True)
        print(f"runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
