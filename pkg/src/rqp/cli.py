"""``rqp`` command line: JSON report on stdout (or ``--out``), summary on stderr."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import acceptance, hpath, protocol, sharpp, statevector, strategies, tpath
from .circuit import Circuit, build_w_circuit, hadamard_count, parse_circuit
from .errors import BudgetExceeded, CircuitSyntaxError, DistributionError, RqpError
from .roottwo import RootTwoValue
from .scoring import OutcomeDistribution, parse_distribution


class UsageError(RqpError):
    pass


def _exact(x) -> dict:
    if isinstance(x, (Fraction, RootTwoValue, int)):
        return {"exact": str(x), "decimal": float(x)}
    return {"exact": None, "decimal": float(x)}


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(path)
    return p.read_text(encoding="utf-8")


def _circuit(args) -> Circuit:
    return parse_circuit(_read(args.circuit))


def _need_seed(args) -> int:
    if args.seed is None:
        raise UsageError(f"'{args.command}' samples randomness and needs --seed")
    if args.rounds is not None and args.rounds < 1:
        raise UsageError("--rounds must be at least 1")
    return args.seed


def _rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _report_mode(report: OutcomeDistribution, mode: str) -> OutcomeDistribution:
    return report.to_float() if mode == "float" else report


def cmd_oracle(args) -> dict:
    c = _circuit(args)
    state = statevector.simulate(c)
    out = {
        "command": "oracle",
        "circuit_hash": c.digest(),
        "width": c.width,
        "z1_expectation": statevector.z1_expectation(c),
    }
    if c.gate_set == "ch":
        out["amplitude_at_zero"] = statevector.amplitude_at_zero(c)
    k = args.k or 1
    p = statevector.marginal_probs(state, k)
    out["k"] = k
    out["marginals"] = {format(z, f"0{k}b"): float(v) for z, v in enumerate(p)}
    return out


def cmd_hpath(args) -> dict:
    c = _circuit(args)
    target = c
    if args.z is not None:
        k = args.k or len(args.z)
        target = build_w_circuit(c, k, args.z)
    h = hadamard_count(target)
    out = {"command": "hpath", "circuit_hash": c.digest(), "mode": args.mode, "hadamards": h}
    if args.z is not None:
        out["w_circuit"] = {"k": k, "z": args.z, "width": target.width}
    if args.mode == "enumerate":
        o = hpath.enumerate(target)
        amp = hpath.amplitude_from_triple(o)
        out["counts"] = [o.n1, o.n2, o.n3]
        out["D"] = [str(p) for p in o.probs]
        out["amplitude"] = _exact(amp)
        out["amplitude_path_form"] = f"{o.n1 - o.n2}/2^{h}·√2^{h}"
        if args.z is not None:
            out["p_z"] = _exact(Fraction(o.n1 - o.n2, 1 << hadamard_count(c)))
    else:
        seed = _need_seed(args)
        runs = args.rounds or 10_000
        w = hpath.sample_runs(target, np.random.default_rng(seed), runs)
        freq = [int(np.count_nonzero(w == i)) for i in (1, 2, 3)]
        out.update(seed=seed, runs=runs, counts=freq, D=[f / runs for f in freq])
        out["amplitude_estimate"] = float(2 ** (h / 2) * (freq[0] - freq[1]) / runs)
    return out


def cmd_tpath(args) -> dict:
    c = _circuit(args)
    ze = tpath.z_expectation(c)
    return {
        "command": "tpath",
        "circuit_hash": c.digest(),
        "t_count": c.count("T"),
        "z_expectation": _exact(ze),
        "p_acc": _exact(tpath.acceptance_probability(c)),
    }


def cmd_p1(args) -> dict:
    seed = _need_seed(args)
    rounds = args.rounds or 10_000
    inst = protocol.DecisionInstance(_circuit(args))
    strategy = strategies.parse_strategy("honest-exact" if args.server == "honest" else args.server)
    b = strategies.decision_bit(strategy, inst)
    exact = protocol.expected_reward_p1(inst, b)
    honest = protocol.expected_reward_p1(inst, inst.correct_bit)
    rewards = protocol.Protocol1Session(inst, b).sample_rewards(np.random.default_rng(seed), rounds)
    return {
        "protocol": "p1",
        "circuit_hash": inst.circuit.digest(),
        "strategy": args.server,
        "message": b,
        "p_acc": _exact(inst.p_acc),
        "exact_expected_reward": str(exact),
        "exact_expected_reward_decimal": float(exact),
        "empirical_mean": float(rewards.mean()),
        "rounds": rounds,
        "seed": seed,
        "gap": str(honest - exact),
        "first_round": asdict(protocol.run_protocol1(inst, b, seed)),
    }


def _p2_report(args, v: Circuit, k: int, rng: np.random.Generator) -> tuple[str, OutcomeDistribution]:
    if args.report:
        return f"file:{args.report}", parse_distribution(_read(args.report))
    strategy = strategies.parse_strategy(args.strategy or "honest-exact")
    report = strategies.make_report(strategy, v, k, rng)
    if not isinstance(report, OutcomeDistribution):
        raise UsageError(f"strategy {strategy.tag!r} has no distribution report")
    return strategy.selector, report


def _k(args) -> int:
    if args.k is None:
        raise UsageError(f"'{args.command}' needs --k")
    return args.k


def cmd_p2(args) -> dict:
    seed = _need_seed(args)
    rounds = args.rounds or 10_000
    v = _circuit(args)
    k = _k(args)
    server_rng, client_rng = _rngs(seed, 2)
    name, report = _p2_report(args, v, k, server_rng)
    report = _report_mode(report, args.mode)
    exact = protocol.expected_reward_p2(v, k, report)
    gap = protocol.reward_gap(v, k, report)
    rewards = protocol.Protocol2Session(v, k, report).sample_rewards(client_rng, rounds)
    return {
        "protocol": "p2",
        "circuit_hash": v.digest(),
        "strategy": name,
        "k": k,
        "report": dict(zip(report.labels(), map(str, report.probs))),
        "exact_expected_reward": str(exact) if report.exact else None,
        "exact_expected_reward_decimal": float(exact),
        "empirical_mean": float(rewards.mean()),
        "rounds": rounds,
        "seed": seed,
        "gap": str(gap) if report.exact else None,
        "gap_decimal": float(gap),
    }


def cmd_gap(args) -> dict:
    v = _circuit(args)
    k = _k(args)
    if not args.report and not args.strategy:
        raise UsageError("'gap' needs --report or --strategy")
    name, report = _p2_report(args, v, k, np.random.default_rng(args.seed or 0))
    report = _report_mode(report, args.mode)
    truth = protocol.exact_distribution(v, k)
    gap = protocol.reward_gap(v, k, report)
    return {
        "command": "gap",
        "circuit_hash": v.digest(),
        "k": k,
        "hadamards": hadamard_count(v),
        "strategy": name,
        "truth": dict(zip(truth.labels(), map(str, truth.probs))),
        "report": dict(zip(report.labels(), map(str, report.probs))),
        "gap": str(gap) if report.exact else None,
        "gap_decimal": float(gap),
    }


def cmd_audit(args) -> dict:
    seed = _need_seed(args)
    rounds = args.rounds or 10_000
    v = _circuit(args)
    if args.protocol == 1:
        if args.bit is None:
            raise UsageError("protocol 1 audit needs --bit")
        session = protocol.Protocol1Session(protocol.DecisionInstance(v), args.bit)
        message = str(args.bit)
    else:
        k = _k(args)
        server_rng, _ = _rngs(seed, 2)
        message, report = _p2_report(args, v, k, server_rng)
        session = protocol.Protocol2Session(v, k, _report_mode(report, args.mode))
    res = protocol.audit_estimator(session, rounds, args.eps, seed, exhaustive=args.exhaustive)
    return {
        "command": "audit",
        "protocol": f"p{args.protocol}",
        "circuit_hash": v.digest(),
        "message": message,
        "eta": res.eta,
        "exact_expected_reward": _exact(res.exact),
        "rounds": rounds,
        "eps": args.eps,
        "hoeffding_bound": res.bound,
        "within_eps": res.within,
        "seed": seed,
    }


def cmd_sharpp(args) -> dict:
    out: dict = {"command": "sharpp"}
    if args.exhaustive_n3:
        out["exhaustive_n3"] = sharpp.exhaustive_check(3)
    if args.phi:
        phi = sharpp.parse_truth_table(_read(args.phi))
        truth = sharpp.phi_distribution(phi)
        out.update(n=phi.n, count=phi.zeros(), D=[str(p) for p in truth.probs])
        if args.report:
            report = parse_distribution(_read(args.report))
            if report.k != 1:
                raise DistributionError("a counting report must have k = 1")
            exp = sharpp.expected_reward_sharpp(phi, report)
            best = sharpp.expected_reward_sharpp(phi, truth)
            out["report"] = [str(p) for p in report.probs]
            out["expected_reward"] = _exact(exp)
            out["gap"] = _exact(best - exp)
            out["recovered_count"] = sharpp.recover_count(report, phi.n)
            if args.rounds:
                rng = np.random.default_rng(_need_seed(args))
                vals = [sharpp.run_sharpp_round(phi, report, rng) for _ in range(args.rounds)]
                out.update(rounds=args.rounds, seed=args.seed, empirical_mean=float(sum(vals)) / args.rounds)
    elif not args.exhaustive_n3:
        raise UsageError("'sharpp' needs --phi or --exhaustive-n3")
    return out


def cmd_verify(args) -> dict:
    wanted = sorted(acceptance.CRITERIA) if not args.criteria else [int(x) for x in args.criteria.split(",")]
    results = []
    for n in wanted:
        if n not in acceptance.CRITERIA:
            raise UsageError(f"no acceptance criterion {n}")
        r = acceptance.CRITERIA[n]()
        # timings go to stderr only, so the JSON is reproducible
        print(r.line(), file=sys.stderr)
        results.append({"criterion": r.number, "name": r.name, "passed": r.passed, "budget": r.budget})
    return {"command": "verify", "passed": all(r["passed"] for r in results), "criteria": results}


COMMANDS = {
    "oracle": cmd_oracle,
    "hpath": cmd_hpath,
    "tpath": cmd_tpath,
    "p1": cmd_p1,
    "p2": cmd_p2,
    "gap": cmd_gap,
    "audit": cmd_audit,
    "sharpp": cmd_sharpp,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--circuit", help="circuit file (line format)")
    common.add_argument("--k", type=int, help="number of leading output qubits")
    common.add_argument("--z", help="outcome bits selecting W_z")
    common.add_argument("--strategy", help="server strategy selector")
    common.add_argument("--report", help="distribution file reported by the server")
    common.add_argument("--rounds", type=int, help="number of sampled rounds")
    common.add_argument("--seed", type=int, help="seed for all sampled randomness")
    common.add_argument("--mode", default=None, help="exact|float (enumerate|sample for hpath)")
    common.add_argument("--out", help="write the JSON report here instead of stdout")

    parser = argparse.ArgumentParser(prog="rqp", description="Rational-proof protocol simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("oracle", parents=[common], help="dense statevector oracle")
    sub.add_parser("hpath", parents=[common], help="classical path machine (sample or enumerate)")
    sub.add_parser("tpath", parents=[common], help="Clifford+T Pauli path sum")
    p1 = sub.add_parser("p1", parents=[common], help="decision protocol session")
    p1.add_argument("--server", choices=["honest", "flip"], default="honest")
    sub.add_parser("p2", parents=[common], help="distribution protocol session")
    sub.add_parser("gap", parents=[common], help="exact reward gap of a report")
    audit = sub.add_parser("audit", parents=[common], help="Hoeffding estimate of a message's reward")
    audit.add_argument("--protocol", type=int, choices=[1, 2], default=2)
    audit.add_argument("--bit", type=int, choices=[0, 1])
    audit.add_argument("--eps", type=float, default=1e-2)
    audit.add_argument("--exhaustive", action="store_true", help="use the exact expectation")
    sp = sub.add_parser("sharpp", parents=[common], help="counting protocol")
    sp.add_argument("--phi", help="truth table file, one bit per line")
    sp.add_argument("--exhaustive-n3", action="store_true")
    verify = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    verify.add_argument("--criteria", help="comma-separated criterion numbers")
    return parser


def _validate_mode(args) -> None:
    if args.command == "hpath":
        args.mode = args.mode or "enumerate"
        if args.mode not in ("enumerate", "sample"):
            raise UsageError("hpath --mode must be enumerate or sample")
    else:
        args.mode = args.mode or "exact"
        if args.mode not in ("exact", "float"):
            raise UsageError("--mode must be exact or float")
    if args.command not in ("verify", "sharpp") and not args.circuit:
        raise UsageError(f"'{args.command}' needs --circuit")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _validate_mode(args)
        report = COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"rqp: file not found: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return 2
    except CircuitSyntaxError as exc:
        print(f"rqp: parse error: {exc}", file=sys.stderr)
        return 2
    except DistributionError as exc:
        print(f"rqp: invalid distribution: {exc}", file=sys.stderr)
        return 2
    except BudgetExceeded as exc:
        print(f"rqp: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except RqpError as exc:
        print(f"rqp: invalid input: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.command == "verify":
        return 0 if report["passed"] else 1
    print(f"rqp {args.command}: ok", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
