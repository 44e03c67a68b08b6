"""JSON instance files.

Complex numbers are ``[re, im]`` pairs written with Python's shortest
round-trip float repr, so decoding reproduces every value bit for bit.
An instance file is ``{"version": ..., "kind": ..., "payload": {...}}``.
"""
from __future__ import annotations

import json

import numpy as np

from .algebra import AlgebraElement, AlgebraSpec
from .cpgns import LinearMap
from .errors import ModfactorError, ParseError
from .factor import StinespringData
from .hilbmod import Correspondence, MatrixModule, ModuleElement, ModuleMap, PresentedModule

VERSION = "modfactor/1"
KINDS = ("cp_map_problem", "phi_map_problem", "factorization_bundle", "stinespring_bundle", "gns_result")


# encoding

def _c(z) -> list:
    return [float(z.real), float(z.imag)]


def encode_matrix(M) -> list:
    M = np.asarray(M)
    return [[_c(z) for z in row] for row in M]


def encode_spec(spec: AlgebraSpec) -> dict:
    return {"blocks": list(spec.block_dims)}


def encode_element(a: AlgebraElement) -> list:
    return [encode_matrix(b) for b in a.blocks]


def _encode_coords(spec, coords) -> list:
    return encode_element(spec.from_coords(coords))


def encode_module(m: PresentedModule) -> dict:
    A = m.algebra
    out = {
        "algebra": encode_spec(A),
        "k": m.k,
        "gram": [[_encode_coords(A, m.gram_coords[i, j]) for j in range(m.k)] for i in range(m.k)],
    }
    if isinstance(m, MatrixModule):
        out["matrix_module"] = {"rows": m.rows, "cols": m.cols}
    return out


def encode_module_element(u: ModuleElement) -> list:
    return [encode_element(c) for c in u.coeffs]


def encode_correspondence(c: Correspondence) -> dict:
    out = encode_module(c.module)
    A, k = c.module.algebra, c.module.k
    out["left_algebra"] = encode_spec(c.left_algebra)
    out["action"] = [
        [[_encode_coords(A, act[i, j]) for j in range(k)] for i in range(k)] for act in c.action
    ]
    return out


def encode_map(phi: LinearMap) -> dict:
    return {
        "domain": encode_spec(phi.domain),
        "codomain": encode_spec(phi.codomain),
        "values": [encode_element(v) for v in phi.values],
    }


def encode_module_map(T: ModuleMap) -> dict:
    return {
        "domain": encode_module(T.domain),
        "codomain": encode_module(T.codomain),
        "values": [encode_module_element(v) for v in T.values],
    }


def encode_stinespring(s: StinespringData) -> dict:
    return {
        "H1_dim": s.H1_dim,
        "H2_dim": s.H2_dim,
        "K1": encode_module(s.K1),
        "K2": encode_module(s.K2),
        "rho": [encode_matrix(r) for r in s.rho],
        "Psi": [encode_matrix(p) for p in s.Psi],
        "V": encode_matrix(s.V),
        "Wstar": encode_matrix(s.Wstar),
    }


def instance(kind: str, payload: dict) -> dict:
    if kind not in KINDS:
        raise ValueError(f"unknown instance kind {kind!r}")
    return {"version": VERSION, "kind": kind, "payload": payload}


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False) + "\n"


# decoding

class _Reader:
    """Walks decoded JSON, tracking the field path for error messages."""

    def __init__(self, data, path="$"):
        self.data = data
        self.path = path

    def fail(self, msg):
        raise ParseError(msg, field=self.path)

    def __getitem__(self, key):
        if isinstance(key, str):
            if not isinstance(self.data, dict):
                self.fail("expected an object")
            if key not in self.data:
                raise ParseError(f"missing key {key!r}", field=self.path)
            return _Reader(self.data[key], f"{self.path}.{key}")
        if not isinstance(self.data, list):
            self.fail("expected an array")
        if not 0 <= key < len(self.data):
            self.fail(f"index {key} out of range")
        return _Reader(self.data[key], f"{self.path}[{key}]")

    def get(self, key):
        if isinstance(self.data, dict) and key in self.data:
            return self[key]
        return None

    def items(self):
        if not isinstance(self.data, list):
            self.fail("expected an array")
        return [self[i] for i in range(len(self.data))]

    def integer(self, minimum=None):
        if isinstance(self.data, bool) or not isinstance(self.data, int):
            self.fail("expected an integer")
        if minimum is not None and self.data < minimum:
            self.fail(f"expected an integer >= {minimum}")
        return self.data

    def complex_matrix(self, shape=None):
        rows = self.items()
        out = []
        for r in rows:
            row = []
            for z in r.items():
                pair = z.data
                if (
                    not isinstance(pair, list)
                    or len(pair) != 2
                    or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
                ):
                    z.fail("expected a [re, im] pair of numbers")
                row.append(complex(pair[0], pair[1]))
            out.append(row)
        widths = {len(row) for row in out}
        if len(widths) > 1:
            self.fail("ragged matrix")
        M = np.array(out, dtype=complex).reshape(len(out), widths.pop() if widths else 0)
        if not np.all(np.isfinite(M)):
            self.fail("non-finite entry")
        if shape is not None and M.shape != tuple(shape):
            self.fail(f"expected shape {tuple(shape)}, got {M.shape}")
        return M


def _guard(reader, fn):
    try:
        return fn()
    except ParseError:
        raise
    except (ModfactorError, ValueError, TypeError) as exc:
        raise ParseError(str(exc), field=reader.path) from None


def decode_spec(r: _Reader) -> AlgebraSpec:
    blocks = [b.integer(minimum=1) for b in r["blocks"].items()]
    return _guard(r, lambda: AlgebraSpec(tuple(blocks)))


def decode_element(r: _Reader, spec: AlgebraSpec) -> AlgebraElement:
    blocks = r.items()
    if len(blocks) != len(spec.block_dims):
        r.fail(f"{spec} needs {len(spec.block_dims)} blocks, got {len(blocks)}")
    mats = [b.complex_matrix((n, n)) for b, n in zip(blocks, spec.block_dims)]
    return AlgebraElement(spec, mats)


def _square_coords(r: _Reader, spec, k) -> np.ndarray:
    rows = r.items()
    if len(rows) != k:
        r.fail(f"expected {k} rows")
    out = np.zeros((k, k, spec.N), dtype=complex)
    for i, row in enumerate(rows):
        entries = row.items()
        if len(entries) != k:
            row.fail(f"expected {k} entries")
        for j, e in enumerate(entries):
            out[i, j] = decode_element(e, spec).coords()
    return out


def decode_module(r: _Reader) -> PresentedModule:
    spec = decode_spec(r["algebra"])
    k = r["k"].integer(minimum=0)
    gram = _square_coords(r["gram"], spec, k)
    hint = r.get("matrix_module")
    if hint is not None:
        rows, cols = hint["rows"].integer(minimum=1), hint["cols"].integer(minimum=1)
        m = _guard(hint, lambda: MatrixModule(rows, cols))
        if not m.same_as(PresentedModule(spec, gram), atol=0.0):
            hint.fail("Gram does not match the declared matrix module")
        return m
    module = _guard(r, lambda: PresentedModule(spec, gram))
    if not module.is_positive():
        r["gram"].fail("Gram is not positive semidefinite")
    return module


def decode_module_element(r: _Reader, module: PresentedModule) -> ModuleElement:
    coeffs = r.items()
    if len(coeffs) != module.k:
        r.fail(f"expected {module.k} coefficients")
    return ModuleElement.from_coeffs(module, [decode_element(c, module.algebra) for c in coeffs])


def decode_correspondence(r: _Reader) -> Correspondence:
    module = decode_module(r)
    left = decode_spec(r["left_algebra"])
    acts = r["action"].items()
    if len(acts) != left.N:
        r["action"].fail(f"expected one matrix per basis element of {left} ({left.N})")
    action = np.stack([_square_coords(a, module.algebra, module.k) for a in acts]) if acts else None
    return _guard(r, lambda: Correspondence(module, left, action))


def decode_map(r: _Reader) -> LinearMap:
    dom, cod = decode_spec(r["domain"]), decode_spec(r["codomain"])
    vals = r["values"].items()
    if len(vals) != dom.N:
        r["values"].fail(f"expected {dom.N} values")
    return _guard(r, lambda: LinearMap.from_values(dom, cod, [decode_element(v, cod) for v in vals]))


def decode_module_map(r: _Reader) -> ModuleMap:
    dom, cod = decode_module(r["domain"]), decode_module(r["codomain"])
    vals = r["values"].items()
    if len(vals) != dom.free_dim:
        r["values"].fail(f"expected {dom.free_dim} values (one per free basis vector)")
    return _guard(r, lambda: ModuleMap.from_values(dom, cod, [decode_module_element(v, cod) for v in vals]))


def decode_stinespring(r: _Reader) -> StinespringData:
    K1, K2 = decode_module(r["K1"]), decode_module(r["K2"])
    return StinespringData(
        r["H1_dim"].integer(minimum=1),
        r["H2_dim"].integer(minimum=1),
        K1,
        K2,
        np.array([m.complex_matrix() for m in r["rho"].items()]),
        np.array([m.complex_matrix() for m in r["Psi"].items()]),
        r["V"].complex_matrix(),
        r["Wstar"].complex_matrix(),
    )


_PAYLOADS = {
    "cp_map_problem": {"map": decode_map},
    "phi_map_problem": {"T": decode_module_map, "phi": decode_map},
    "factorization_bundle": {
        "E": decode_module,
        "correspondence": decode_correspondence,
        "zeta": None,
        "v": None,
    },
    "stinespring_bundle": {"T": decode_module_map, "phi": decode_map, "data": decode_stinespring},
    "gns_result": {"correspondence": decode_correspondence, "zeta": None, "phi": decode_map},
}
_OPTIONAL = {("phi_map_problem", "phi")}


def loads(text: str):
    """Parse an instance file into ``(kind, payload)`` with decoded objects."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    r = _Reader(data)
    if not isinstance(data, dict):
        r.fail("an instance file must be a JSON object")
    version = r["version"].data
    if version != VERSION:
        r["version"].fail(f"unsupported version {version!r}, expected {VERSION!r}")
    kind = r["kind"].data
    if kind not in _PAYLOADS:
        r["kind"].fail(f"unknown kind {kind!r}")
    p = r["payload"]
    out = {}
    for key, dec in _PAYLOADS[kind].items():
        if dec is None:
            continue
        if (kind, key) in _OPTIONAL and p.get(key) is None:
            out[key] = None
            continue
        out[key] = dec(p[key])
    if kind in ("factorization_bundle", "gns_result"):
        corr = out["correspondence"]
        out["zeta"] = _guard(p["zeta"], lambda: decode_module_element(p["zeta"], corr.module))
    if kind == "factorization_bundle":
        out["v"] = decode_module_map(p["v"])
    return kind, {key: out[key] for key in _PAYLOADS[kind]}


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def encode_payload(kind: str, **objs) -> dict:
    enc = {
        "map": encode_map,
        "phi": encode_map,
        "T": encode_module_map,
        "v": encode_module_map,
        "E": encode_module,
        "correspondence": encode_correspondence,
        "zeta": encode_module_element,
        "data": encode_stinespring,
    }
    return instance(kind, {k: enc[k](v) for k, v in objs.items() if v is not None})
