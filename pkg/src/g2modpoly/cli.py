"""Command-line front end.

Subcommands:
    compute     build a modular polynomial set and save it
    verify      theorem-level checks on a saved set
    eval        numeric coefficients of the polynomials at a period matrix
    degrees     per-coefficient degree table of a saved set
    humbert     degree data of the Humbert surface of discriminant p^2
    cosets      coset counts for the relevant congruence subgroups
    theta       the ten even theta constants at a period matrix
    invariants  an invariant triple at a period matrix

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 precision abort.
"""

import argparse
import logging
import os
import random
import sys
from dataclasses import dataclass

from sympy import isprime

from . import invariants, modpoly, siegel
from .errors import G2Error, PrecisionLossError
from .precision import PrecisionContext, to_mpc

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_PRECISION = 3


@dataclass
class JobConfig:
    command: str
    kind: str = "bprime"
    p: int = 3
    precision: int = 512
    threads: int = 1
    seed: int = 2026
    output: str = None
    input: str = None
    resume: bool = False

    def validate(self):
        if self.p < 2 or not isprime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.kind not in modpoly.KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == invariants.KIND_BPRIME and self.p == 2:
            raise ValueError("the theta-quotient kind requires p > 2")
        if self.precision < 128:
            raise ValueError("precision must be at least 128 bits")
        if self.threads < 1:
            raise ValueError("thread count must be positive")

    def context(self):
        return PrecisionContext(n_bits=self.precision,
                                n_low_bits=max(96, self.precision // 4))


def _add_common(sp, point=False):
    sp.add_argument("--kind", default="bprime",
                    choices=sorted(modpoly.KINDS))
    sp.add_argument("--precision", type=int,
                    default=int(os.environ.get("G2MODPOLY_PRECISION", 512)))
    sp.add_argument("--seed", type=int, default=2026)
    sp.add_argument("--threads", type=int,
                    default=int(os.environ.get("G2MODPOLY_THREADS", 1)))
    if point:
        sp.add_argument("--tau", metavar="T1,T2,T3",
                        help="comma-separated period matrix entries as "
                             "complex literals; a seeded random fundamental "
                             "point if omitted")


def _parser():
    ap = argparse.ArgumentParser(prog="g2modpoly", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="build and save a set")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--output", required=True,
                   default=os.environ.get("G2MODPOLY_OUTPUT"))
    c.add_argument("--checkpoint-dir",
                   default=os.environ.get("G2MODPOLY_CHECKPOINT"))
    c.add_argument("--resume", action="store_true",
                   help="reuse node evaluations from the checkpoint dir")
    _add_common(c)

    v = sub.add_parser("verify", help="check a saved set")
    v.add_argument("--input", required=True)
    v.add_argument("--trials", type=int, default=10)
    _add_common(v)

    e = sub.add_parser("eval", help="numeric polynomials at a point")
    e.add_argument("--p", type=int, required=True)
    _add_common(e, point=True)

    d = sub.add_parser("degrees", help="degree table of a saved set")
    d.add_argument("--input", required=True)

    h = sub.add_parser("humbert", help="Humbert surface degrees")
    h.add_argument("--p", type=int, required=True)

    co = sub.add_parser("cosets", help="coset count")
    co.add_argument("--p", type=int, required=True)
    _add_common(co)

    t = sub.add_parser("theta", help="even theta constants at a point")
    _add_common(t, point=True)

    i = sub.add_parser("invariants", help="invariant triple at a point")
    _add_common(i, point=True)
    return ap


def _config(args):
    cfg = JobConfig(command=args.command)
    for f in ("kind", "p", "precision", "threads", "seed", "output",
              "input", "resume"):
        if hasattr(args, f) and getattr(args, f) is not None:
            setattr(cfg, f, getattr(args, f))
    if cfg.command in ("humbert", "degrees"):
        if cfg.command == "humbert" and (cfg.p < 2 or not isprime(cfg.p)):
            raise ValueError(f"p = {cfg.p} is not prime")
        return cfg
    cfg.validate()
    if getattr(args, "tau", None):
        siegel.PeriodMatrix(*_parse_tau(args.tau))
    return cfg


def _parse_tau(s):
    parts = s.split(",")
    if len(parts) != 3:
        raise ValueError("--tau takes three comma-separated complex entries")
    return tuple(complex(p.strip()) for p in parts)


def _point(args, cfg, ctx):
    if getattr(args, "tau", None):
        t1, t2, t3 = (to_mpc(v) for v in _parse_tau(args.tau))
        return siegel.PeriodMatrix(t1, t2, t3)
    return siegel.random_fundamental_point(random.Random(cfg.seed), ctx)


def _fmt(z, digits=30):
    return f"{complex(z).real:.{digits}g}{complex(z).imag:+.{digits}g}j"


def _cmd_compute(args, cfg):
    ctx = cfg.context()
    opts = modpoly.BuildOptions(seed=cfg.seed,
                                checkpoint_dir=args.checkpoint_dir)
    if args.checkpoint_dir and not cfg.resume:
        for name in ("discover.ckpt", "grid.ckpt"):
            path = os.path.join(args.checkpoint_dir, name)
            if os.path.exists(path):
                os.remove(path)
    mset = modpoly.build(cfg.p, cfg.kind, ctx, opts)
    modpoly.save_set(mset, cfg.output)
    nmono = sum(len(P.monomials) for t in (mset.phi1_num, mset.psi2_num,
                                           mset.psi3_num)
                for P in t.values())
    print(f"p={cfg.p} kind={cfg.kind} precision={ctx.n_bits} "
          f"den_monomials={len(mset.denominator.monomials)} "
          f"num_monomials={nmono} output={cfg.output}")
    return EXIT_OK


def _cmd_verify(args, cfg):
    mset = modpoly.load_set(cfg.input)
    rep = modpoly.verify(mset, args.trials, cfg.context(),
                         random.Random(cfg.seed))
    for line in rep.lines():
        print(line)
    return EXIT_OK if rep.all_pass else EXIT_VERIFY


def _cmd_eval(args, cfg):
    ctx = cfg.context()
    with ctx.workprec():
        om = _point(args, cfg, ctx)
        cosets = modpoly.coset_table(cfg.p, cfg.kind)
        ev = modpoly.evaluate_at(om, cfg.p, cfg.kind, cosets, ctx)
        print(f"omega: {_fmt(om.tau1)} {_fmt(om.tau2)} {_fmt(om.tau3)}")
        for name, vec in (("phi1", ev.phi1), ("psi2", ev.psi2),
                          ("psi3", ev.psi3)):
            for l, c in enumerate(vec):
                print(f"{name} {l} {_fmt(c)}")
    return EXIT_OK


def _cmd_degrees(args, cfg):
    mset = modpoly.load_set(cfg.input)
    print("poly l deg_b1 deg_b2 deg_b3")
    for name, table in (("phi1", mset.phi1_num), ("psi2", mset.psi2_num),
                        ("psi3", mset.psi3_num)):
        for l in sorted(table):
            dx, dy, dz = table[l].degrees()
            print(f"{name} {l} {dx} {dy} {dz}")
    dx, dy, dz = mset.denominator.degrees()
    print(f"den - {dx} {dy} {dz}")
    return EXIT_OK


def _cmd_humbert(args, cfg):
    o = modpoly.humbert_degree(cfg.p)
    print(f"a={o.a_value} component_degree={o.component_degree} "
          f"H_degree={o.h_degree}")
    return EXIT_OK


def _cmd_cosets(args, cfg):
    print(len(modpoly.coset_table(cfg.p, cfg.kind)))
    return EXIT_OK


def _cmd_theta(args, cfg):
    from . import theta
    ctx = cfg.context()
    with ctx.workprec():
        om = _point(args, cfg, ctx)
        th = theta.theta_all(om, ctx)
        for i in theta.EVEN:
            print(f"theta_{i} {_fmt(th[i])}")
    return EXIT_OK


def _cmd_invariants(args, cfg):
    ctx = cfg.context()
    with ctx.workprec():
        om = _point(args, cfg, ctx)
        tr = invariants.invariants_of(om, ctx, cfg.kind)
        for name, v in zip(("f1", "f2", "f3"), tr.values()):
            print(f"{name} {_fmt(v)}")
    return EXIT_OK


_COMMANDS = {
    "compute": _cmd_compute,
    "verify": _cmd_verify,
    "eval": _cmd_eval,
    "degrees": _cmd_degrees,
    "humbert": _cmd_humbert,
    "cosets": _cmd_cosets,
    "theta": _cmd_theta,
    "invariants": _cmd_invariants,
}


def run(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args, cfg)
    except PrecisionLossError as e:
        print(f"precision abort: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except (G2Error, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFY


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
