"""Command-line interface.

Exit status: 0 when every check passes, 1 when a mathematical check fails,
2 on malformed input or usage errors.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import serialize
from .algebra import AlgebraSpec
from .cpgns import choi, gns, gns_defect, gns_gram_positive, gns_minimality, kraus_decomposition
from .errors import (
    Inconsistent,
    InternalError,
    InvalidInput,
    ModfactorError,
    NotCP,
    NotFull,
    NotIsometry,
    NotPhiMap,
    NotPositive,
    ParseError,
    WellDefinednessFailure,
    WrongShape,
)
from .factor import (
    cp_map_of_vector,
    cyclicity_check,
    factorize,
    from_factorization,
    infer_phi,
    phi_map_defect,
    stinespring,
    stinespring_defects,
)
from .generators import make_rng, random_cp, random_module, random_operator_phi_map, random_phi_map
from .hilbmod import check_left_action, interior_tensor, module_dim
from .numerics import NumericConfig, max_abs
from .report import Report

MATH_ERRORS = (NotCP, NotPhiMap, NotFull, Inconsistent, NotIsometry, WellDefinednessFailure)
INPUT_ERRORS = (ParseError, InvalidInput, WrongShape, NotPositive, InternalError)
SEED_ENV = "MODFACTOR_SEED"


class UsageError(Exception):
    pass


def _load(path, kinds):
    kind, payload = serialize.load(path)
    if kind not in kinds:
        raise UsageError(f"expected an instance of kind {' or '.join(kinds)}, got {kind!r}")
    return kind, payload


def _choi_report(phi, cfg, report):
    spectra, skew = [], 0.0
    for C in choi(phi):
        skew = max(skew, max_abs(C - C.conj().T))
        spectra.append(np.linalg.eigvalsh((C + C.conj().T) / 2))
    neg = max(max(0.0, -w[0] / max(1.0, w[-1])) for w in spectra)
    report.defects["choi_hermitian_defect"] = skew
    report.defects["choi_negativity"] = neg
    report.thresholds["choi_negativity"] = cfg.psd_tol
    report.values["choi_min_eigenvalue"] = float(min(w[0] for w in spectra))
    report.values["choi_block_min_eigenvalues"] = [float(w[0]) for w in spectra]
    return spectra


def cmd_check_cp(args, cfg, report):
    _, p = _load(args.file, ["cp_map_problem"])
    phi = p["map"]
    spectra = _choi_report(phi, cfg, report)
    kd = kraus_decomposition(phi, cfg)
    report.values["kraus_defect"] = kd.defect
    report.values["kraus_operators"] = kd.count
    report.values["gns_gram_positive"] = gns_gram_positive(phi, cfg)
    report.dims["domain"] = phi.domain.N
    report.dims["codomain"] = phi.codomain.N
    return None, ("spectrum", spectra)


def cmd_gns(args, cfg, report):
    _, p = _load(args.file, ["cp_map_problem"])
    phi = p["map"]
    g = gns(phi, cfg)
    report.defects["gns_defect"] = gns_defect(g)
    report.defects.update(check_left_action(g.corr, cfg).as_dict())
    mini = gns_minimality(g, cfg)
    report.defects["minimality_gap"] = abs(mini.module_rank - mini.span_rank)
    report.thresholds["minimality_gap"] = 0
    report.dims["generators"] = g.corr.module.k
    report.dims["F_corr"] = mini.module_rank
    return serialize.encode_payload("gns_result", correspondence=g.corr, zeta=g.zeta, phi=phi), None


def cmd_check_phimap(args, cfg, report):
    _, p = _load(args.file, ["phi_map_problem"])
    if p["phi"] is None:
        raise UsageError("check-phimap needs a phi in the payload (use infer-phi otherwise)")
    T, phi = p["T"], p["phi"]
    report.defects["phi_map_defect"] = phi_map_defect(T, phi)
    report.defects["well_definedness_defect"] = max(T.kernel_defect(cfg), 0.0)
    report.dims["E"] = module_dim(T.domain, cfg)
    report.dims["F"] = module_dim(T.codomain, cfg)
    return None, None


def cmd_infer_phi(args, cfg, report):
    _, p = _load(args.file, ["phi_map_problem"])
    T = p["T"]
    phi = infer_phi(T, cfg)
    report.defects["phi_map_defect"] = phi_map_defect(T, phi)
    if p["phi"] is not None:
        report.values["distance_to_given_phi"] = max_abs(phi.matrix - p["phi"].matrix)
    return serialize.encode_payload("cp_map_problem", map=phi), None


def _phi_or_infer(p, cfg, report):
    if p["phi"] is not None:
        return p["phi"]
    report.values["phi_inferred"] = True
    return infer_phi(p["T"], cfg)


def cmd_factorize(args, cfg, report):
    _, p = _load(args.file, ["phi_map_problem"])
    T = p["T"]
    phi = _phi_or_infer(p, cfg, report)
    f = factorize(T, phi, cfg)
    report.defects.update(f.defects)
    report.dims.update(f.dims)
    out = serialize.encode_payload(
        "factorization_bundle", E=T.domain, correspondence=f.gns.corr, zeta=f.gns.zeta, v=f.v
    )
    return out, None


def _cyclicity(s, cfg, report):
    cyc = cyclicity_check(s, cfg)
    report.defects["cyclicity_gap"] = cyc.K1_dim - cyc.cyclic_rank
    report.defects["nondegeneracy_gap"] = cyc.K2_dim - cyc.nondegenerate_rank
    report.thresholds["cyclicity_gap"] = 0
    report.thresholds["nondegeneracy_gap"] = 0
    report.values["stinespring_cyclic"] = cyc.stinespring_cyclic
    report.values["nondegenerate"] = cyc.nondegenerate
    report.dims.update({"H1": s.H1_dim, "H2": s.H2_dim, "K1": s.K1_dim, "K2": s.K2_dim})


def cmd_stinespring(args, cfg, report):
    _, p = _load(args.file, ["phi_map_problem"])
    T = p["T"]
    phi = _phi_or_infer(p, cfg, report)
    s = stinespring(T, phi, cfg)
    report.defects.update(s.defects)
    _cyclicity(s, cfg, report)
    return serialize.encode_payload("stinespring_bundle", T=T, phi=phi, data=s), None


def cmd_verify(args, cfg, report):
    kind, p = _load(args.file, ["factorization_bundle", "stinespring_bundle"])
    if kind == "stinespring_bundle":
        s = p["data"]
        report.defects.update(stinespring_defects(s, p["T"], p["phi"], cfg))
        _cyclicity(s, cfg, report)
        return None, None
    E, corr, zeta, v = p["E"], p["correspondence"], p["zeta"], p["v"]
    tensor = interior_tensor(E, corr, cfg)
    if not v.domain.same_as(tensor):
        raise InvalidInput("v is not defined on E (.) F")
    report.defects["isometry_defect"] = v.isometry_defect()
    report.defects["well_definedness_defect"] = max(v.kernel_defect(cfg), 0.0)
    report.dims["tensor"] = module_dim(tensor, cfg)
    report.dims["F"] = module_dim(v.codomain, cfg)
    if report.defects["isometry_defect"] > cfg.verify_tol:
        phi = cp_map_of_vector(corr, zeta)
    else:
        T, phi = from_factorization(corr, zeta, v, E, cfg)
        report.defects["phi_map_defect"] = phi_map_defect(T, phi)
    _choi_report(phi, cfg, report)
    return None, None


def _parse_spec(text):
    try:
        parts = text.split(":")
        if len(parts) != 2:
            raise ValueError
        B, C = (AlgebraSpec(tuple(int(x) for x in part.split(","))) for part in parts)
    except (ValueError, ModfactorError):
        raise UsageError(f"--spec must look like '2,1:2' (domain blocks:codomain blocks), got {text!r}") from None
    return B, C


def cmd_generate(args, cfg, report):
    B, C = _parse_spec(args.spec)
    seed = args.seed
    if seed is None:
        try:
            seed = int(os.environ.get(SEED_ENV, "0"))
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    report.seed = seed
    if args.rank < 1 or args.gens < 1 or args.pad < 0:
        raise UsageError("--rank and --gens must be >= 1, --pad >= 0")
    rng = make_rng(seed)
    if args.what == "cp":
        phi = random_cp(B, C, args.rank, rng)
        out = serialize.encode_payload("cp_map_problem", map=phi)
        report.dims.update({"domain": B.N, "codomain": C.N})
        return out, None
    E = random_module(B, args.gens, rng)
    if args.operator:
        if len(C.block_dims) != 1:
            raise UsageError("--operator needs a single-block codomain M_d1")
        T, phi, F = random_operator_phi_map(E, C.block_dims[0], args.rank, args.pad, rng, cfg)
    else:
        T, phi, F = random_phi_map(E, C, args.rank, args.pad, rng, cfg)
    report.defects["phi_map_defect"] = phi_map_defect(T, phi)
    report.dims.update({"E": module_dim(E, cfg), "F": module_dim(F, cfg)})
    return serialize.encode_payload("phi_map_problem", T=T, phi=phi), None


COMMANDS = {
    "check-cp": cmd_check_cp,
    "gns": cmd_gns,
    "check-phimap": cmd_check_phimap,
    "infer-phi": cmd_infer_phi,
    "factorize": cmd_factorize,
    "stinespring": cmd_stinespring,
    "verify": cmd_verify,
    "generate": cmd_generate,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="absolute defect bound (verify_tol)")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON report (default)")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text", help="plain-text report")
    common.add_argument("--out", default=None, help="write the constructed object to this file")
    common.add_argument("--figure", default=None, help="render a figure (png/pdf/svg) to this path")
    common.set_defaults(fmt="json")

    parser = argparse.ArgumentParser(prog="modfactor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "check-cp": "complete positivity of a linear map (Choi criterion)",
        "gns": "GNS correspondence and cyclic vector of a CP map",
        "check-phimap": "check <T x, T x'> = phi(<x, x'>)",
        "infer-phi": "recover phi from T",
        "factorize": "factor T = v(id (.) zeta) through the GNS correspondence",
        "stinespring": "dilation data for T into B(H1, H2)",
        "verify": "re-check a factorization or dilation bundle",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("file")
    g = sub.add_parser("generate", parents=[common], help="seeded random instances")
    g.add_argument("what", choices=["cp", "phimap"])
    g.add_argument("--spec", default="2:2", help="domain and codomain blocks, e.g. '2,1:2'")
    g.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    g.add_argument("--rank", type=int, default=2)
    g.add_argument("--gens", type=int, default=2, help="generators of E")
    g.add_argument("--pad", type=int, default=1, help="spare generators of F")
    g.add_argument("--operator", action="store_true", help="target B(H1, H2) instead of a free module")
    return parser


def _render(report, fmt):
    return report.to_json() if fmt == "json" else report.to_text()


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    try:
        cfg = NumericConfig() if args.tol is None else NumericConfig(verify_tol=args.tol)
    except InvalidInput as exc:
        print(f"modfactor: {exc}", file=sys.stderr)
        return 2
    report = Report(args.command, cfg.as_dict())
    artifact = figure = None
    status = None
    try:
        artifact, figure = COMMANDS[args.command](args, cfg, report)
    except MATH_ERRORS as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        status = 1
    except (UsageError, OSError, *INPUT_ERRORS) as exc:
        report.error = f"{type(exc).__name__}: {exc}"
        print(f"modfactor: {report.error}", file=sys.stderr)
        sys.stdout.write(_render(report, args.fmt))
        return 2
    except Exception as exc:  # malformed input must never crash the CLI
        report.error = f"unexpected {type(exc).__name__}: {exc}"
        print(f"modfactor: {report.error}", file=sys.stderr)
        sys.stdout.write(_render(report, args.fmt))
        return 2

    if status is None:
        status = 0 if report.passed else 1

    if args.command == "generate" and args.out is None and artifact is not None:
        sys.stdout.write(serialize.dumps(artifact))
        return status
    if args.out and artifact is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(serialize.dumps(artifact))
    if args.figure:
        from . import plotting

        if figure is not None and figure[0] == "spectrum":
            plotting.choi_spectrum_figure(figure[1], args.figure, title=f"{args.command}: Choi spectrum")
        elif report.defects:
            th = {k: report.threshold(k) for k in report.defects}
            plotting.defects_figure(report.defects, th, args.figure, title=args.command)
    sys.stdout.write(_render(report, args.fmt))
    return status


if __name__ == "__main__":
    sys.exit(main())
