"""Acceptance suite for the regret model: one test and one printed
PASS/FAIL line per criterion.  All randomness is seeded.

The end-to-end criterion trains a real model and benchmarks the solver
with its predictions; it takes a few minutes on one core.
"""
import time

import numpy as np
import pytest
import torch

from regretgls.bench import SolverConfig, oracle_references, run_fixed_time
from regretgls.data import build_record, line_graph
from regretgls.instance import generate_random
from regretgls.regret import regret_matrix

from gnn_regret.dataset import record_tensors
from gnn_regret.model import ModelConfig, build_model
from gnn_regret.predict import predict_to_dir
from gnn_regret.train import TrainConfig, learning_rate, train


def _report(name: str, ok: bool, detail: str) -> None:
    print(f"\n{'PASS' if ok else 'FAIL'}: {name} ({detail})", flush=True)
    assert ok, f"{name}: {detail}"


def test_model_shape_and_relabel_equivariance(records10):
    # output length equals the line-graph node count, and relabeling the
    # line-graph nodes permutes the output exactly
    rec = records10[0]
    x, arcs, _ = record_tensors(rec, ("weight",))
    model = build_model(ModelConfig(), seed=0)
    model.eval()
    with torch.no_grad():
        out = model(x, arcs)
    length_ok = out.shape == (len(rec["nodes"]),) == (45,)

    torch.manual_seed(17)
    exact = True
    for _ in range(5):
        perm = torch.randperm(x.shape[0])
        inv = torch.argsort(perm)
        with torch.no_grad():
            relabeled = model(x[inv], perm[arcs])
        exact = exact and torch.equal(relabeled, out[inv])
    _report(
        "model shape and exact relabel equivariance",
        length_ok and exact,
        f"length {tuple(out.shape)} for 45 pairs, 5 permutations exact={exact}",
    )


def test_overfit_probe_and_lr_schedule(records10):
    # a 10-record n=10 set must be memorized: training loss below 1e-3
    # inside 200 epochs, with the exponential decay schedule to 1e-12
    channels = tuple(records10[0]["channels"].keys())
    model = build_model(ModelConfig(d_x=len(channels)), seed=0)
    cfg = TrainConfig(
        batch_size=2, epochs=200, patience=None, seed=0, channels=channels
    )
    t0 = time.perf_counter()
    result = train(model, records10, cfg)
    elapsed = time.perf_counter() - t0
    losses = [h.train_loss for h in result.history]
    first = next((h.epoch for h in result.history if h.train_loss < 1e-3), None)
    schedule_ok = all(
        abs(h.lr - learning_rate(h.epoch)) <= 1e-12 for h in result.history
    )
    _report(
        "overfit probe and learning-rate schedule",
        first is not None and schedule_ok,
        f"loss<1e-3 at epoch {first}, min {min(losses):.2e}, "
        f"schedule exact to 1e-12: {schedule_ok}, {elapsed:.0f}s",
    )


def test_end_to_end_guides_solver():
    # train on 120 instances, predict regret for 50 held-out ones, and
    # the solver guided by those files must stay within 0.5 gap points
    # of its weight-guide baseline at a 1 s budget
    t0 = time.perf_counter()
    train_recs = [
        build_record(generate_random(10, seed=40_000 + i)) for i in range(120)
    ]
    held = [generate_random(10, seed=41_000 + i) for i in range(50)]
    held_recs = [build_record(inst) for inst in held]

    channels = tuple(train_recs[0]["channels"].keys())
    model = build_model(ModelConfig(d_x=len(channels)), seed=0)
    cfg = TrainConfig(
        batch_size=32, epochs=100, patience=None, seed=0, channels=channels
    )
    result = train(model, train_recs, cfg)
    t_train = time.perf_counter() - t0

    import tempfile

    with tempfile.TemporaryDirectory() as out_dir:
        paths = predict_to_dir(model, held_recs, channels, out_dir)
        assert len(paths) == 50

        # predicted regret must rank edges like the oracle does
        rhos = []
        for inst, rec, path in zip(held, held_recs, paths):
            lg = line_graph(inst)
            iu, ju = lg.pairs[:, 0], lg.pairs[:, 1]
            oracle = regret_matrix(inst).values[iu, ju]
            predicted = np.loadtxt(path, delimiter=",", skiprows=2, usecols=2)
            ranks_o = np.argsort(np.argsort(oracle)).astype(float)
            ranks_p = np.argsort(np.argsort(predicted)).astype(float)
            rhos.append(float(np.corrcoef(ranks_o, ranks_p)[0, 1]))
        mean_rho = float(np.mean(rhos))

        refs = oracle_references(held)
        budget = 1.0
        weight_report, _ = run_fixed_time(
            held, SolverConfig(kind="gls", guide="weight"), budget, refs
        )
        regret_report, _ = run_fixed_time(
            held, SolverConfig(kind="gls", guide=f"regret:{out_dir}"), budget, refs
        )

    margin = regret_report.mean_gap - weight_report.mean_gap
    ok = margin <= 0.5 and mean_rho > 0.0
    _report(
        "end-to-end predicted guidance",
        ok,
        f"mean gap predicted {regret_report.mean_gap:.4f}% vs weight "
        f"{weight_report.mean_gap:.4f}% (margin {margin:+.4f} <= 0.5), "
        f"mean rank correlation {mean_rho:.3f} > 0, "
        f"final train loss {result.history[-1].train_loss:.2e}, "
        f"{time.perf_counter() - t0:.0f}s total ({t_train:.0f}s training)",
    )
