"""Regenerate the JSON fixtures under tests/fixtures.

    python scripts/make_fixtures.py

Positive fixtures must pass their command (exit 0); negative ones carry
a planted defect and must fail (exit 1).  manifest.json records both.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from modfactor import serialize
from modfactor.algebra import AlgebraSpec
from modfactor.cpgns import LinearMap, identity_map, trace_map, transpose_map
from modfactor.factor import factorize, pad_k2, stinespring
from modfactor.generators import (
    make_rng,
    perturb_non_cp,
    random_cp,
    random_module,
    random_operator_phi_map,
    random_phi_map,
)
from modfactor.hilbmod import ModuleMap, PresentedModule, free_module, matrix_module

ROOT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
SCALARS = AlgebraSpec((1,))
M2 = AlgebraSpec((2,))


def write(sub, name, kind, **objs):
    path = ROOT / sub / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize.dumps(serialize.encode_payload(kind, **objs)), encoding="utf-8")
    return f"{sub}/{name}"


def scalar_problem():
    E = F = free_module(SCALARS, 1)
    T = ModuleMap(E, F, [[np.sqrt(2.0)]])
    phi = LinearMap(SCALARS, SCALARS, [[2.0]])
    return T, phi


def identity_dilation_problem():
    E, F = free_module(M2, 1), matrix_module(2, 2)
    cols = [F.from_operator(M2.from_coords(e).rep()).coords for e in np.eye(4)]
    return ModuleMap(E, F, np.stack(cols, axis=1)), identity_map(M2)


def main():
    entries = []

    def add(path, command, exit_code):
        entries.append({"file": path, "command": command, "exit": exit_code})

    # positives
    T, phi = scalar_problem()
    p = write("positive", "scalar_example.json", "phi_map_problem", T=T, phi=phi)
    for cmd in ("check-phimap", "factorize", "infer-phi", "stinespring"):
        add(p, cmd, 0)
    p = write("positive", "identity_m2.json", "cp_map_problem", map=identity_map(M2))
    add(p, "check-cp", 0)
    add(p, "gns", 0)
    p = write("positive", "trace_m2.json", "cp_map_problem", map=trace_map(M2))
    add(p, "check-cp", 0)
    add(p, "gns", 0)
    p = write("positive", "random_cp_12_21.json", "cp_map_problem",
              map=random_cp(AlgebraSpec((1, 2)), AlgebraSpec((2, 1)), 2, 11))
    add(p, "check-cp", 0)
    add(p, "gns", 0)

    rng = make_rng(7)
    E = random_module(AlgebraSpec((1, 2)), 2, rng)
    T, phi, _ = random_phi_map(E, AlgebraSpec((2,)), 2, 1, rng)
    p = write("positive", "phimap_free.json", "phi_map_problem", T=T, phi=phi)
    for cmd in ("check-phimap", "infer-phi", "factorize"):
        add(p, cmd, 0)
    f = factorize(T, phi)
    p = write("positive", "factorization_bundle.json", "factorization_bundle",
              E=E, correspondence=f.gns.corr, zeta=f.gns.zeta, v=f.v)
    add(p, "verify", 0)

    Td, phid = identity_dilation_problem()
    p = write("positive", "identity_dilation.json", "phi_map_problem", T=Td, phi=phid)
    add(p, "stinespring", 0)
    add(p, "factorize", 0)

    rng = make_rng(3)
    E2 = random_module(M2, 1, rng)
    To, phio, _ = random_operator_phi_map(E2, 2, 1, 1, rng)
    p = write("positive", "operator_phimap.json", "phi_map_problem", T=To, phi=phio)
    add(p, "stinespring", 0)
    s = stinespring(To, phio)
    p = write("positive", "stinespring_bundle.json", "stinespring_bundle", T=To, phi=phio, data=s)
    add(p, "verify", 0)

    # negatives
    add(write("negative", "transpose_m2.json", "cp_map_problem", map=transpose_map(M2)), "check-cp", 1)
    reduction = LinearMap(M2, M2, trace_map(M2).matrix[0][None, :] * M2.unit_coords[:, None] - np.eye(4))
    add(write("negative", "reduction_m2.json", "cp_map_problem", map=reduction), "check-cp", 1)
    add(write("negative", "negative_scalar.json", "cp_map_problem", map=LinearMap(SCALARS, SCALARS, [[-1.0]])),
        "check-cp", 1)
    bad = perturb_non_cp(random_cp(AlgebraSpec((1, 2)), M2, 2, 5), 5)
    add(write("negative", "perturbed_direct_sum.json", "cp_map_problem", map=bad), "check-cp", 1)
    bad = perturb_non_cp(random_cp(AlgebraSpec((2,)), AlgebraSpec((1, 1)), 1, 6), 6)
    add(write("negative", "gns_not_cp.json", "cp_map_problem", map=bad), "gns", 1)

    add(write("negative", "phimap_doubled.json", "phi_map_problem", T=T.scaled(2.0), phi=phi), "check-phimap", 1)
    noise = make_rng(99)
    noisy = ModuleMap(T.domain, T.codomain,
                      T.matrix + 1e-3 * (noise.standard_normal(T.matrix.shape) + 1j * noise.standard_normal(T.matrix.shape)))
    add(write("negative", "phimap_noisy.json", "phi_map_problem", T=noisy, phi=phi), "check-phimap", 1)
    add(write("negative", "infer_inconsistent.json", "phi_map_problem", T=noisy), "infer-phi", 1)
    Z = PresentedModule(M2, np.zeros((1, 1, 4)))
    add(write("negative", "infer_not_full.json", "phi_map_problem",
              T=ModuleMap(Z, free_module(M2, 1), np.zeros((4, 4)))), "infer-phi", 1)
    add(write("negative", "factorize_not_phimap.json", "phi_map_problem", T=noisy, phi=phi), "factorize", 1)
    not_cp = perturb_non_cp(phi, 1)
    add(write("negative", "factorize_not_cp.json", "phi_map_problem", T=T, phi=not_cp), "factorize", 1)
    add(write("negative", "bundle_not_isometry.json", "factorization_bundle",
              E=E, correspondence=f.gns.corr, zeta=f.gns.zeta, v=f.v.scaled(2.0)), "verify", 1)
    add(write("negative", "stinespring_padded_k2.json", "stinespring_bundle", T=To, phi=phio, data=pad_k2(s)),
        "verify", 1)
    s_bad = stinespring(To, phio)
    s_bad.rho = s_bad.rho.copy()
    s_bad.rho[0] = s_bad.rho[0] + 0.01 * np.eye(s_bad.rho.shape[1])
    add(write("negative", "stinespring_bad_rho.json", "stinespring_bundle", T=To, phi=phio, data=s_bad),
        "verify", 1)

    (ROOT / "manifest.json").write_text(json.dumps(entries, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {len(entries)} fixture checks")


if __name__ == "__main__":
    main()
