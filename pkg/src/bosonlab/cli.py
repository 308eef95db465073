"""Command-line drivers for the experiments.

Every subcommand writes <name>.csv (per-sample records, byte-identical
across reruns with the same arguments) and <name>.json (summary + config
echo) into --out-dir (default: $BOSONLAB_OUT or the current directory),
and prints a short summary. Exit codes: 0 success, 1 invariant violation
detected during the run, 2 usage error, 3 capacity guard.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import stats as spstats

from ._version import __version__
from .distribution import (
    anticoncentration_experiment,
    exact_sampler,
    full_distribution,
    outcome_probability,
)
from .embedding import (
    build_embedding,
    build_embedding_gbs,
    gbs_pattern_feasibility_experiment,
    verify_embedding_gbs_identity,
    verify_embedding_identity,
)
from .errors import CapacityError, ContractViolation, DomainError
from .fock import (
    as_pattern,
    click_experiment,
    click_pmf,
    click_stats,
    dim_fock,
    enumerate_outcomes,
    rank_outcome,
    sample_uniform_outcome,
    unrank_outcome,
)
from .gbs import (
    GbsConfig,
    gbs_normalization_experiment,
    gbs_probability,
    gbs_sector_mass,
    photon_number_mean,
    photon_number_mode,
    photon_number_pmf,
    photon_number_truncation,
    photon_number_variance,
    photon_number_variance_alt,
    postselected_probability,
)
from .interpolation import (
    PolySamplePath,
    blowup_scaling_experiment,
    end_to_end_smuggle_demo,
    fit_and_extrapolate,
    sample_grid,
)
from .permanent import per_exact, per_exact_int, per_oracle
from .randmat import (
    haar_unitary,
    inverse_gap_moment_experiment,
    log_density_unnormalized,
    max_sv_tail_experiment,
    scaled_truncation,
    sphere_lemma_experiments,
    submatrix_with_repetitions,
)
from .report import ExperimentReport
from .rng import stream


def _parse_int_list(text: str) -> list[int]:
    # "4:16" -> 4..16 inclusive; "4,6,8" -> [4, 6, 8]; "12" -> [12]
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x]


def _parse_float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _parse_pattern(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x)


def _emit(report: ExperimentReport, args) -> None:
    report.config["workers"] = args.workers
    report.config["cli_version"] = __version__
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, f"{report.name}.csv")
    json_path = os.path.join(args.out_dir, f"{report.name}.json")
    report.write_csv(csv_path)
    report.write_json(json_path)
    print(f"[{report.name}] wrote {csv_path} and {json_path}")


def _cmd_anticoncentration(args) -> bool:
    report = anticoncentration_experiment(
        _parse_int_list(args.n),
        alpha=args.alpha,
        units=args.units,
        outcomes_per_unit=args.outcomes,
        seed=args.seed,
        long_run=args.long_run,
    )
    _emit(report, args)
    for key, entry in report.summary.items():
        box = entry["box_shifted"]
        print(
            f"  n={key} m={entry['m']} shifted median={box['median']:+.3f} "
            f"iqr=[{box['q1']:+.3f}, {box['q3']:+.3f}] zeros={entry['zero_probability_samples']}"
        )
    return True


def _cmd_clicks(args) -> bool:
    report = click_experiment(args.m, args.n, args.t, args.trials, args.seed)
    _emit(report, args)
    s = report.summary
    print(
        f"  tail empirical={s['tail_empirical']:.6f} exact={s['tail_exact']:.6f} "
        f"bound={s['bound']:.6f} center={s['center']:.4f}"
    )
    return bool(s["within_bound"])


def _cmd_svtail(args) -> bool:
    report = max_sv_tail_experiment(
        args.m, args.n, _parse_float_list(args.deltas), args.trials, args.seed
    )
    _emit(report, args)
    for row in report.rows:
        closed = f" closed={row[4]:.3e}" if row[4] is not None else ""
        print(f"  delta={row[0]} empirical={row[1]:.3e} bound={row[3]:.3e}{closed}")
    return bool(report.summary["all_within_bound"])


def _cmd_invgap(args) -> bool:
    report = inverse_gap_moment_experiment(args.m, args.n, args.trials, args.seed)
    _emit(report, args)
    s = report.summary
    print(
        f"  estimate={s['estimate']:.4f} half={s['half_sample_estimate']:.4f} "
        f"bound=1e{math.log10(s['bound']):.0f} regime_ok={s['regime_ok']}"
    )
    return bool(s["within_bound"])


def _cmd_sphere(args) -> bool:
    report = sphere_lemma_experiments(args.dim, args.k, args.delta, args.trials, args.seed)
    _emit(report, args)
    s = report.summary
    print(
        f"  small-mass {s['small_empirical']:.3e} <= {s['small_bound']:.3e}; "
        f"cap {s['cap_empirical']:.3e} >= {s['cap_lower_bound']:.3e}"
    )
    return bool(s["small_within_upper"] and s["cap_above_lower"])


def _cmd_embed_verify(args) -> bool:
    rng = stream(args.seed, 0)
    report = ExperimentReport(
        name="embed-verify",
        description="exact integer check of the pattern-embedding permanent identity on random instances",
        config={
            "n": args.n,
            "m": args.m,
            "trials": args.trials,
            "seed": args.seed,
            "two_pattern": args.gbs,
        },
        columns=["trial", "pattern_s", "pattern_t", "lhs", "rhs", "equal"],
    )
    failures = 0
    shown = 0
    trial = 0
    attempts = 0
    while trial < args.trials and attempts < 1000 * args.trials:
        attempts += 1
        s = sample_uniform_outcome(args.m, args.n, rng)
        if args.gbs:
            t = sample_uniform_outcome(args.m, args.n, rng)
            st_s, st_t = click_stats(s), click_stats(t)
            l = args.n - st_s.collisions - st_t.collisions
            if (
                l < 1
                or st_s.singles < st_t.collisions
                or st_t.singles < st_s.collisions
                or l < max(st_s.collisions, st_t.collisions)
            ):
                continue
            x = (rng.random((l, l)) < 0.5).astype(np.int64)
            spec = build_embedding_gbs(x, s, t)
            lhs, rhs, equal = verify_embedding_gbs_identity(spec)
            t_str = " ".join(map(str, t.occupations))
            mats = {"x": spec.x.tolist(), "a": spec.a.tolist(), "a_st": spec.a_st.tolist()}
        else:
            c = click_stats(s).clicks
            x = (rng.random((c, c)) < 0.5).astype(np.int64)
            spec = build_embedding(x, s)
            lhs, rhs, equal = verify_embedding_identity(spec)
            t_str = ""
            mats = {"x": spec.x.tolist(), "a": spec.a.tolist(), "a_s": spec.a_s.tolist()}
        report.add_row(trial, " ".join(map(str, s.occupations)), t_str, lhs, rhs, equal)
        if not equal:
            failures += 1
        if shown < args.show_matrices:
            report.summary[f"instance_{trial}"] = mats
            shown += 1
        trial += 1
    report.summary.update(
        {"trials": trial, "failures": failures, "all_equal": bool(failures == 0)}
    )
    _emit(report, args)
    print(f"  {trial} instances, {failures} failures")
    return failures == 0


def _cmd_interpolate(args) -> bool:
    if args.blowup_scan:
        report = blowup_scaling_experiment(
            _parse_int_list(args.d_values),
            _parse_float_list(args.delta_values),
            seed=args.seed,
            epsilon=args.noise if args.noise > 0 else 1e-6,
        )
        _emit(report, args)
        for row in report.rows:
            print(
                f"  d={row[0]} delta={row[1]} amp={row[3]:.3e} "
                f"amp/(1/delta)^d={row[4]:.3f} random={row[5]:.3e}"
            )
        return True
    degree = 2 * args.n
    delta = args.delta if args.delta is not None else 1.0 / (4.0 * args.n * args.n)
    t = sample_grid(degree, delta, args.nodes)
    rng = stream(args.seed, 0)
    coef = rng.standard_normal(degree + 1)
    x = 2.0 * t / delta - 1.0
    y = cheb.chebval(x, coef)
    truth = float(cheb.chebval(2.0 / delta - 1.0, coef))
    if args.noise > 0:
        y = y + rng.uniform(-args.noise, args.noise, len(t))
    n_corrupt = int(math.floor(args.corrupt * len(t)))
    if n_corrupt:
        idx = rng.choice(len(t), size=n_corrupt, replace=False)
        y = np.array(y)
        y[idx] += np.where(rng.random(n_corrupt) < 0.5, -1.0, 1.0)
    fit = fit_and_extrapolate(PolySamplePath(degree, delta, t, y), eta=args.eta)
    report = ExperimentReport(
        name="interpolate",
        description="synthetic polynomial extrapolation: noise and corruption response of the trimmed fit",
        config={
            "n": args.n,
            "degree": degree,
            "delta": delta,
            "nodes": len(t),
            "noise": args.noise,
            "corrupt": args.corrupt,
            "eta": args.eta,
            "seed": args.seed,
        },
        columns=["index", "t", "y"],
        summary={
            "truth": truth,
            "estimate": fit.estimate,
            "abs_error": abs(fit.estimate - truth),
            "amplification": (abs(fit.estimate - truth) / args.noise) if args.noise > 0 else None,
            "power_law": (1.0 / delta) ** degree,
            "residual_rms": fit.residual_rms,
            "design_cond": fit.design_cond,
            "discarded": len(fit.discarded),
        },
    )
    for i, (ti, yi) in enumerate(zip(t, y)):
        report.add_row(i, float(ti), float(yi))
    _emit(report, args)
    print(f"  truth={truth:.6e} estimate={fit.estimate:.6e} abs_err={abs(fit.estimate - truth):.3e}")
    return True


def _cmd_smuggle(args) -> bool:
    report = end_to_end_smuggle_demo(
        args.n, args.m, seed=args.seed, noise_scale=args.noise, eta=args.eta, nodes=args.nodes
    )
    _emit(report, args)
    s = report.summary
    best = s.get("estimate_precise", s["estimate_double"])
    print(
        f"  truth={s['truth']} estimate={best:.9e} "
        f"recovered={s['rounding_recovered']} (double-fit rel err {s['rel_error_double']:.2e})"
    )
    if args.noise == 0:
        return bool(s["rounding_recovered"])
    return bool(s.get("within_envelope", True))


def _chisquare_vs_exact(counts: dict, probs: dict, total: int):
    # Pool cells with expected count < 5 into one bin, then Pearson chi-square.
    observed, expected = [], []
    tail_obs = tail_exp = 0.0
    for pat, p in probs.items():
        e = p * total
        o = counts.get(pat, 0)
        if e >= 5.0:
            observed.append(o)
            expected.append(e)
        else:
            tail_obs += o
            tail_exp += e
    if tail_exp > 0:
        observed.append(tail_obs)
        expected.append(tail_exp)
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    expected *= observed.sum() / expected.sum()
    if len(observed) < 2:
        return float("nan"), 1.0
    stat, p = spstats.chisquare(observed, expected)
    return float(stat), float(p)


def _cmd_sample(args) -> bool:
    u = haar_unitary(args.m, args.seed, stream_id=0)
    rng = stream(args.seed, 1)
    draws = exact_sampler(u.matrix, args.m, args.n, rng, size=args.count)
    counts: dict = {}
    report = ExperimentReport(
        name="sample",
        description="exact inverse-CDF sampling from the outcome distribution of a Haar interferometer",
        config={"m": args.m, "n": args.n, "count": args.count, "seed": args.seed},
        columns=["draw", "rank", "pattern"],
    )
    for i, pat in enumerate(draws):
        counts[pat] = counts.get(pat, 0) + 1
        report.add_row(i, rank_outcome(pat), " ".join(map(str, pat.occupations)))
    dist = full_distribution(u.matrix, args.m, args.n)
    stat, pval = _chisquare_vs_exact(counts, dist, args.count)
    report.summary = {
        "chi2_stat": stat,
        "chi2_pvalue": pval,
        "distinct_patterns": len(counts),
        "dim": dim_fock(args.m, args.n),
    }
    _emit(report, args)
    print(f"  {args.count} draws, {len(counts)} distinct patterns, chi2 p={pval:.4f}")
    return bool(pval > 1e-3)


def _cmd_gbs_pmf(args) -> bool:
    n_max = args.n_max if args.n_max is not None else photon_number_truncation(args.m, args.r)
    report = ExperimentReport(
        name="gbs-pmf",
        description="total-photon-number law under uniform squeezing",
        config={"m": args.m, "r": args.r, "n_max": n_max},
        columns=["n", "pmf", "cumulative"],
    )
    cum = 0.0
    for n in range(n_max + 1):
        p = photon_number_pmf(args.m, args.r, n)
        cum += p
        report.add_row(n, p, cum)
    mode = photon_number_mode(args.m, args.r)
    report.summary = {
        "mean": photon_number_mean(args.m, args.r),
        "variance_negative_binomial": photon_number_variance(args.m, args.r),
        "variance_alt_form": photon_number_variance_alt(args.m, args.r) if args.r > 0 else None,
        "mode_scan": mode.scan,
        "mode_floor_m_minus_1": mode.floor_m_minus_1,
        "mode_floor_m": mode.floor_m,
        "truncation_tail_1e-12": photon_number_truncation(args.m, args.r),
        "mass_up_to_n_max": cum,
    }
    _emit(report, args)
    print(f"  mean={report.summary['mean']:.4f} mode={mode.scan} mass<=n_max: {cum:.12f}")
    return True


def _cmd_gbs_normalize(args) -> bool:
    report = gbs_normalization_experiment(args.m, args.n, args.draws, args.seed, r=args.r)
    _emit(report, args)
    s = report.summary
    print(
        f"  max |postselected-1|={s['max_postselected_deviation']:.2e} "
        f"max sector-mass rel dev={s['max_sector_mass_rel_deviation']:.2e}"
    )
    return bool(
        s["max_postselected_deviation"] <= 1e-8 and s["max_sector_mass_rel_deviation"] <= 1e-8
    )


def _cmd_gbs_feasibility(args) -> bool:
    report = gbs_pattern_feasibility_experiment(args.m, args.n, args.trials, args.seed)
    _emit(report, args)
    s = report.summary
    print(
        f"  feasible frequency={s['feasible_frequency']:.4f} "
        f"ci95=[{s['ci95_low']:.4f}, {s['ci95_high']:.4f}] ratio_ok={s['mode_ratio_ok']}"
    )
    return True


def _cmd_gbs_probability(args) -> bool:
    s = as_pattern(_parse_pattern(args.s))
    t = as_pattern(_parse_pattern(args.t))
    u = haar_unitary(args.m, args.seed, stream_id=0)
    cfg = GbsConfig(m=args.m, r=args.r, u=u.matrix)
    p_cond = postselected_probability(u.matrix, s, t)
    q = gbs_probability(cfg, s, t)
    pmf = photon_number_pmf(args.m, args.r, s.n)
    report = ExperimentReport(
        name="gbs-probability",
        description="two-pattern probability under uniform squeezing for one Haar interferometer",
        config={"m": args.m, "r": args.r, "s": list(s.occupations), "t": list(t.occupations), "seed": args.seed},
        columns=["quantity", "value"],
        summary={
            "postselected": p_cond,
            "unpostselected": q,
            "photon_number_pmf": pmf,
            "product_identity_rel_dev": abs(q - pmf * p_cond) / q if q > 0 else 0.0,
        },
    )
    report.add_row("postselected", p_cond)
    report.add_row("unpostselected", q)
    report.add_row("photon_number_pmf", pmf)
    _emit(report, args)
    print(f"  p(S,T | n)={p_cond:.6e} q(S,T)={q:.6e} P(n)={pmf:.6e}")
    return bool(q == 0.0 or abs(q - pmf * p_cond) / q <= 1e-9)


def _selftest_checks():
    yield "permanent of identity(5) is 1", lambda: abs(per_exact(np.eye(5)) - 1) < 1e-12
    yield "permanent of ones(4) is 24", lambda: abs(per_exact(np.ones((4, 4))) - 24) < 1e-10
    yield "permanent [[1,2],[3,4]] is 10", lambda: abs(per_exact([[1, 2], [3, 4]]) - 10) < 1e-12

    def _cross():
        rng = stream(20260814, 0)
        mat = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        return abs(per_exact(mat) - per_oracle(mat)) <= 1e-10 * abs(per_oracle(mat))

    yield "subset path matches permutation oracle (6 x 6)", _cross

    def _int_cross():
        rng = stream(20260814, 1)
        mat = (rng.random((7, 7)) < 0.5).astype(np.int64)
        return per_exact_int(mat) == round(per_oracle(mat.astype(np.complex128)).real)

    yield "integer path matches permutation oracle (7 x 7)", _int_cross

    def _hom():
        u = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        return (
            outcome_probability(u, (1, 1)) < 1e-12
            and abs(outcome_probability(u, (2, 0)) - 0.5) < 1e-12
        )

    yield "two-photon interference null and bunching", _hom

    def _norm():
        u = haar_unitary(4, 20260814, 2).matrix
        return abs(sum(full_distribution(u, 4, 2).values()) - 1.0) < 1e-9

    yield "distribution normalization at (4, 2)", _norm

    def _enum():
        pats = list(enumerate_outcomes(4, 2))
        if len(pats) != dim_fock(4, 2):
            return False
        return all(unrank_outcome(4, 2, rank_outcome(p)) == p for p in pats)

    yield "enumeration count and rank/unrank roundtrip", _enum

    def _clicks():
        total = sum(click_pmf(7, 4, c) for c in range(1, 5))
        return abs(total - 1.0) < 1e-12

    yield "click law sums to one at (7, 4)", _clicks

    def _embed():
        rng = stream(20260814, 3)
        for _ in range(25):
            s = sample_uniform_outcome(5, 6, rng)
            c = click_stats(s).clicks
            x = (rng.random((c, c)) < 0.5).astype(np.int64)
            if not verify_embedding_identity(build_embedding(x, s))[2]:
                return False
        return True

    yield "embedding identity on 25 random instances", _embed

    def _embed_gbs():
        rng = stream(20260814, 4)
        done = 0
        while done < 25:
            s = sample_uniform_outcome(8, 6, rng)
            t = sample_uniform_outcome(8, 6, rng)
            st_s, st_t = click_stats(s), click_stats(t)
            l = 6 - st_s.collisions - st_t.collisions
            if l < 1 or st_s.singles < st_t.collisions or st_t.singles < st_s.collisions:
                continue
            if l < max(st_s.collisions, st_t.collisions):
                continue
            x = (rng.random((l, l)) < 0.5).astype(np.int64)
            if not verify_embedding_gbs_identity(build_embedding_gbs(x, s, t))[2]:
                return False
            done += 1
        return True

    yield "two-pattern embedding identity on 25 random instances", _embed_gbs

    def _gbs_norm():
        u = haar_unitary(3, 20260814, 5).matrix
        cfg = GbsConfig(m=3, r=0.65, u=u)
        mass = gbs_sector_mass(cfg, 2)
        return abs(mass - photon_number_pmf(3, 0.65, 2)) < 1e-10

    yield "sector mass equals photon-number pmf at (3, 2)", _gbs_norm

    def _haar():
        u = haar_unitary(6, 20260814, 6).matrix
        return np.max(np.abs(u @ u.conj().T - np.eye(6))) < 1e-12

    yield "Haar draw is unitary", _haar

    def _fit():
        t = sample_grid(1, 0.25)
        fit = fit_and_extrapolate(PolySamplePath(1, 0.25, t, t.copy()))
        return abs(fit.estimate - 1.0) < 1e-10

    yield "linear path extrapolates to 1 exactly", _fit

    def _density():
        u = haar_unitary(9, 20260814, 7).matrix
        b = scaled_truncation(u, 2)
        v = log_density_unnormalized(b, 9)
        return math.isfinite(v)

    yield "scaled-truncation log density finite on a draw", _density


def _cmd_selftest(args) -> bool:
    ok = True
    for name, check in _selftest_checks():
        try:
            passed = bool(check())
        except Exception as exc:  # a crash is a failure, keep going
            passed = False
            name = f"{name} (raised {type(exc).__name__}: {exc})"
        print(f"{'ok' if passed else 'FAIL'}: {name}")
        ok = ok and passed
    return ok


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosonlab",
        description="numerical experiments on exact linear-optical sampling distributions",
    )
    parser.add_argument("--version", action="version", version=f"bosonlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument(
            "--out-dir", default=os.environ.get("BOSONLAB_OUT", "."),
            help="output directory (default: $BOSONLAB_OUT or '.')",
        )
        p.add_argument("--workers", type=int, default=1, help="recorded in reports; reductions are deterministic")

    p = sub.add_parser("anticoncentration", help="log-probability quartiles under Haar draws")
    p.add_argument("--n", required=True, help="photon numbers, e.g. 4:16 or 4,8,12")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--units", type=int, default=20)
    p.add_argument("--outcomes", type=int, default=20)
    p.add_argument("--long-run", action="store_true", help="lift the n <= 16 cap")
    common(p)
    p.set_defaults(func=_cmd_anticoncentration)

    p = sub.add_parser("clicks", help="click-count law and concentration")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=float, default=0.25)
    p.add_argument("--trials", type=int, default=100_000)
    common(p)
    p.set_defaults(func=_cmd_clicks)

    p = sub.add_parser("svtail", help="largest-singular-value tail of truncations")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--deltas", default="0.3,0.1,0.05")
    p.add_argument("--trials", type=int, default=100_000)
    common(p)
    p.set_defaults(func=_cmd_svtail)

    p = sub.add_parser("invgap", help="second inverse moment of the spectral gap")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=4096)
    common(p)
    p.set_defaults(func=_cmd_invgap)

    p = sub.add_parser("sphere", help="uniform-sphere coordinate mass and cap bounds")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    common(p)
    p.set_defaults(func=_cmd_sphere)

    p = sub.add_parser("embed-verify", help="integer permanent identity on random embeddings")
    p.add_argument("--n", type=int, required=True, help="photon number")
    p.add_argument("--m", type=int, default=None, help="modes (default 2n)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--gbs", action="store_true", help="two-pattern block construction")
    p.add_argument("--show-matrices", type=int, default=1, help="instances embedded in the JSON")
    common(p)
    p.set_defaults(func=_cmd_embed_verify)

    p = sub.add_parser("interpolate", help="synthetic extrapolation diagnostics")
    p.add_argument("--n", type=int, default=3, help="photon number; fitted degree is 2n")
    p.add_argument("--delta", type=float, default=None, help="sampling interval (default 1/(4n^2))")
    p.add_argument("--nodes", type=int, default=None, help="node count (default 100 (2n)^2)")
    p.add_argument("--noise", type=float, default=0.0, help="uniform noise half-width")
    p.add_argument("--corrupt", type=float, default=0.0, help="fraction of nodes corrupted by +-1")
    p.add_argument("--eta", type=float, default=0.0, help="trimming fraction")
    p.add_argument("--blowup-scan", action="store_true", help="amplification scan over (d, delta) grid")
    p.add_argument("--d-values", default="1,2,4,6")
    p.add_argument("--delta-values", default="1.0,0.5,0.1")
    common(p)
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("smuggle", help="end-to-end worst-case permanent recovery")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=None, help="modes (default 2n)")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--eta", type=float, default=0.0)
    p.add_argument("--nodes", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_smuggle)

    p = sub.add_parser("gbs", help="uniform-squeezing Gaussian variant")
    gsub = p.add_subparsers(dest="gbs_command", required=True)

    g = gsub.add_parser("pmf", help="photon-number law")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--r", type=float, default=0.65)
    g.add_argument("--n-max", type=int, default=None)
    common(g)
    g.set_defaults(func=_cmd_gbs_pmf)

    g = gsub.add_parser("normalize", help="sector normalization across Haar draws")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--draws", type=int, default=5)
    g.add_argument("--r", type=float, default=0.65)
    common(g)
    g.set_defaults(func=_cmd_gbs_normalize)

    g = gsub.add_parser("feasibility", help="embedding feasibility frequency of pattern pairs")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--trials", type=int, default=10_000)
    common(g)
    g.set_defaults(func=_cmd_gbs_feasibility)

    g = gsub.add_parser("probability", help="single pattern-pair probabilities")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--r", type=float, default=0.65)
    g.add_argument("--s", required=True, help="output pattern, e.g. 2,1,0")
    g.add_argument("--t", required=True, help="input pattern, e.g. 1,1,1")
    common(g)
    g.set_defaults(func=_cmd_gbs_probability)

    p = sub.add_parser("sample", help="exact sampling from one Haar interferometer")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=10_000)
    common(p)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("selftest", help="quick invariant battery")
    common(p)
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "m", None) is None and args.command in ("smuggle", "embed-verify"):
        args.m = 2 * args.n
    t0 = time.monotonic()
    try:
        ok = args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except (ContractViolation, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    print(f"done in {time.monotonic() - t0:.2f}s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
