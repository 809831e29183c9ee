"""Command-line entry point: ``rgboost {train,compare,edge,demo-counterexample,eval}``."""

import argparse
import json
import os
import sys
from dataclasses import asdict

from .datasets import load_dataset
from .descent import Ensemble
from .edge import learner_edge
from .experiment import ExperimentConfig, compare, counterexample_demo, eval_metrics, run_experiment, run_algorithm
from .objectives import make_objective
from .learners import make_learner


def _config(args):
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    d = asdict(cfg)
    for key in ("objective", "lam", "learner", "algorithm", "T", "seed", "test_fraction"):
        val = getattr(args, key, None)
        if val is not None:
            d[key] = val
    if getattr(args, "schedule", None):
        d["schedule"] = json.loads(args.schedule)
    if getattr(args, "standardize", False):
        d["standardize"] = True
    return ExperimentConfig(**d)


def _data(args, cfg):
    return load_dataset(args.data, args.format, task=args.task, seed=cfg.seed, test_fraction=cfg.test_fraction)


def _add_common(p):
    p.add_argument("--config", help="JSON experiment config; flags override its fields")
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=["csv", "libsvm", "ranking"], default="csv")
    p.add_argument("--task", choices=["multiclass", "ranking", "regression"])
    p.add_argument("--objective")
    p.add_argument("--lam", type=float, help="L2 regularization strength")
    p.add_argument("--learner")
    p.add_argument("--schedule", help='JSON, e.g. \'{"name": "fixed", "eta": 0.5}\'')
    p.add_argument("-T", "--T", type=int, dest="T")
    p.add_argument("--seed", type=int)
    p.add_argument("--test-fraction", type=float, dest="test_fraction")
    p.add_argument("--standardize", action="store_true")


def cmd_train(args):
    cfg = _config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    d = asdict(cfg)
    d["curves_path"] = d["curves_path"] or os.path.join(args.out_dir, "curves.csv")
    d["model_path"] = d["model_path"] or os.path.join(args.out_dir, "model.json")
    res = run_experiment(ExperimentConfig(**d), _data(args, cfg))
    print(json.dumps(res.report.summary()))


def cmd_compare(args):
    cfg = _config(args)
    results = compare(cfg, _data(args, cfg), args.out_dir)
    for alg, res in results.items():
        print(json.dumps(res.report.summary()))


class _RecordingLearner:
    """Forwards ``fit`` and remembers every target it was asked to fit."""

    def __init__(self, learner):
        self.learner = learner
        self.targets = []

    def fit(self, target):
        self.targets.append(target)
        return self.learner.fit(target)


def cmd_edge(args):
    cfg = _config(args)
    data = _data(args, cfg)
    cfg = cfg.resolved(data.task)
    space, labels = data.subset(data.train)
    obj = make_objective(cfg.objective, space, labels, cfg.lam)
    learner = make_learner(cfg.learner)
    recorder = _RecordingLearner(learner)
    run_algorithm(cfg, obj, recorder, None)
    est = learner_edge(learner, recorder.targets)
    print(json.dumps(est.to_dict()))


def cmd_demo(args):
    out = counterexample_demo(args.T, args.out_dir)
    for alg, (model, report) in out.items():
        f = model.f.values[:, 0].tolist()
        print(json.dumps({"algorithm": alg, "f_T": f, "objective": report.records[-1].objective,
                          "initial_objective": report.initial_objective,
                          "weak_learners": report.records[-1].weak_learners}))


def cmd_eval(args):
    data = load_dataset(args.data, args.format, task=args.task, seed=args.seed or 0,
                        test_fraction=args.test_fraction if args.test_fraction is not None else 0.2)
    model = Ensemble.load(args.model)
    idx = {"all": None, "train": data.train, "test": data.test}[args.split]
    print(json.dumps(eval_metrics(model, data, args.task, idx)))


def build_parser():
    parser = argparse.ArgumentParser(prog="rgboost", description="Restricted gradient boosting experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one configuration; writes curves.csv and model.json")
    _add_common(p)
    p.add_argument("--algorithm", choices=["naive", "repeated", "repeated-threshold", "residual"])
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compare", help="run naive, repeated and residual on shared data")
    _add_common(p)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("edge", help="worst realized edge of the learner over a run's targets")
    _add_common(p)
    p.add_argument("--algorithm", choices=["naive", "repeated", "repeated-threshold", "residual"])
    p.set_defaults(func=cmd_edge)

    p = sub.add_parser("demo-counterexample", help="naive vs repeated vs residual on 2|f(x1)| + |f(x2)|")
    p.add_argument("-T", "--T", type=int, default=500, dest="T")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("eval", help="evaluate a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--format", choices=["csv", "libsvm", "ranking"], default="csv")
    p.add_argument("--task", choices=["multiclass", "ranking", "regression"])
    p.add_argument("--split", choices=["all", "train", "test"], default="all")
    p.add_argument("--seed", type=int)
    p.add_argument("--test-fraction", type=float, dest="test_fraction")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"rgboost: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
