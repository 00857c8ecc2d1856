"""JSON text format for every object kind, tagged by a ``kind`` field.

Rationals are written as "p/q" strings.  Integer-keyed maps use decimal
string keys in increasing numeric order, and the printer is canonical, so
``dumps(loads(text)) == text`` for anything ``dumps`` produced.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Callable

from .burnside import BurnsideElement, DihedralBurnside
from .euler_of import (
    AdmissibleRep, EulerClass, FpModule, ModuleElement, OFElement, Presentation,
)
from .exactlin import ChainCx, GradedVec, Mat, Ring, WChainCx, WVec, format_rat, parse_rat
from .germ import Germ
from .model_c import CObject
from .model_d import DObject, SectionSpace
from .model_t import TMap, TObject, Vertex, WideSphereData


class FormatError(ValueError):
    """Malformed input; ``where`` is a JSON path or a line/column position."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.message = message
        self.where = where


# ---------------------------------------------------------------- small pieces


def _rat(q) -> str:
    return format_rat(Fraction(q))


def _read_rat(x, path: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise FormatError("expected a rational written as \"p/q\"", path)
    try:
        return parse_rat(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(str(exc), path) from exc


def _int(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError("expected an integer", path)
    return x


def _field(d: dict, key: str, path: str):
    if not isinstance(d, dict):
        raise FormatError("expected an object", path)
    if key not in d:
        raise FormatError(f"missing field {key!r}", path)
    return d[key]


def _list(x, path: str) -> list:
    if not isinstance(x, list):
        raise FormatError("expected a list", path)
    return x


def _intkeys(d, path: str) -> list[tuple[int, Any]]:
    if not isinstance(d, dict):
        raise FormatError("expected an object", path)
    out = []
    for k, v in d.items():
        try:
            out.append((int(k), v))
        except ValueError as exc:
            raise FormatError(f"key {k!r} is not an integer", path) from exc
    return sorted(out)


def _mat(m: Mat) -> dict:
    return {"shape": [m.nrows, m.ncols], "rows": [[_rat(x) for x in row] for row in m.rows]}


def _read_mat(d, path: str) -> Mat:
    shape = _list(_field(d, "shape", path), path + ".shape")
    if len(shape) != 2:
        raise FormatError("shape must have two entries", path + ".shape")
    nrows, ncols = (_int(x, path + ".shape") for x in shape)
    rows = _list(_field(d, "rows", path), path + ".rows")
    if len(rows) != nrows:
        raise FormatError(f"expected {nrows} rows, found {len(rows)}", path + ".rows")
    out = []
    for i, row in enumerate(rows):
        row = _list(row, f"{path}.rows[{i}]")
        if len(row) != ncols:
            raise FormatError(f"expected {ncols} entries", f"{path}.rows[{i}]")
        out.append([_read_rat(x, f"{path}.rows[{i}][{j}]") for j, x in enumerate(row)])
    return Mat(out, ncols)


def _germ(g: Germ, enc: Callable) -> dict:
    return {"exceptional": {str(k): enc(v) for k, v in g.items()}, "generic": enc(g.generic)}


def _read_germ(d, path: str, dec: Callable) -> Germ:
    exc = {}
    for k, v in _intkeys(_field(d, "exceptional", path), path + ".exceptional"):
        if k < 1:
            raise FormatError("indices start at 1", path + ".exceptional")
        exc[k] = dec(v, f"{path}.exceptional.{k}")
    return Germ(exc, dec(_field(d, "generic", path), path + ".generic"))


def _graded(v: GradedVec) -> dict:
    return {str(n): d for n, d in v.dims.items()}


def _read_graded(d, path: str) -> GradedVec:
    return GradedVec({n: _int(x, f"{path}.{n}") for n, x in _intkeys(d, path)})


def _signs(s) -> list | None:
    return None if s is None else list(s)


def _read_signs(x, path: str):
    if x is None:
        return None
    return tuple(_int(s, path) for s in _list(x, path))


# ---------------------------------------------------------------- encoders


def _presentation(p: Presentation) -> dict:
    return {"ring": p.ring.value, "gens": list(p.gens), "rel_degrees": list(p.rel_degrees),
            "rels": _mat(p.rels), "gen_signs": _signs(p.gen_signs), "rel_signs": _signs(p.rel_signs)}


def _read_presentation(d, path: str) -> Presentation:
    ring = _field(d, "ring", path)
    try:
        ring = Ring(ring)
    except ValueError as exc:
        raise FormatError(f"unknown ring {ring!r}", path + ".ring") from exc
    gens = [_int(g, path + ".gens") for g in _list(_field(d, "gens", path), path + ".gens")]
    rel_degs = [_int(g, path + ".rel_degrees") for g in _list(_field(d, "rel_degrees", path), path)]
    return Presentation(ring, tuple(gens), tuple(rel_degs), _read_mat(_field(d, "rels", path), path + ".rels"),
                        _read_signs(d.get("gen_signs"), path + ".gen_signs"),
                        _read_signs(d.get("rel_signs"), path + ".rel_signs"))


def _module(m: FpModule) -> dict:
    return {"ring": m.ring, "parts": _germ(m.parts, _presentation)}


def _read_module(d, path: str) -> FpModule:
    return FpModule(_field(d, "ring", path), _read_germ(_field(d, "parts", path), path + ".parts",
                                                        _read_presentation))


def _vertex(v: Vertex) -> dict:
    return {"degrees": list(v.degrees), "signs": _signs(v.signs)}


def _read_vertex(d, path: str) -> Vertex:
    degs = [_int(x, path + ".degrees") for x in _list(_field(d, "degrees", path), path + ".degrees")]
    return Vertex(tuple(degs), _read_signs(d.get("signs"), path + ".signs"))


def _t_object(a: TObject) -> dict:
    return {"nub": _module(a.nub), "vertex": _vertex(a.vertex), "beta": _germ(a.beta, _mat)}


def _read_t_parts(d, path: str):
    return (_read_module(_field(d, "nub", path), path + ".nub"),
            _read_vertex(_field(d, "vertex", path), path + ".vertex"),
            _read_germ(_field(d, "beta", path), path + ".beta", _read_mat))


def _of_element(x: OFElement) -> dict:
    return {"localized": x.localized,
            "pieces": [{"degree": d, "coeffs": _germ(c, _rat)} for d, c in x.pieces]}


def _read_of_element(d, path: str) -> OFElement:
    pieces = []
    for i, p in enumerate(_list(_field(d, "pieces", path), path + ".pieces")):
        q = f"{path}.pieces[{i}]"
        pieces.append((_int(_field(p, "degree", q), q), _read_germ(_field(p, "coeffs", q), q, _read_rat)))
    return OFElement(tuple(pieces), bool(d.get("localized", False)))


def _cx(c: ChainCx) -> dict:
    return {"dims": _graded(c.dims), "diffs": {str(n): _mat(m) for n, m in c.diffs.items()}}


def _read_cx(d, path: str) -> ChainCx:
    dims = _read_graded(_field(d, "dims", path), path + ".dims")
    diffs = {n: _read_mat(m, f"{path}.diffs.{n}") for n, m in _intkeys(d.get("diffs", {}), path + ".diffs")}
    return ChainCx(dims, diffs)


def _wcx(c: WChainCx) -> dict:
    return {"plus": _cx(c.plus), "minus": _cx(c.minus)}


def _read_wcx(d, path: str) -> WChainCx:
    return WChainCx(_read_cx(_field(d, "plus", path), path + ".plus"),
                    _read_cx(_field(d, "minus", path), path + ".minus"))


def _section_space(s: SectionSpace) -> dict:
    return {"start": s.start, "per_index": {str(k): _graded(v) for k, v in s.per_index.items()},
            "generic": _graded(s.generic), "infinity": _graded(s.infinity)}


def _read_section_space(d, path: str) -> SectionSpace:
    per = {k: _read_graded(v, f"{path}.per_index.{k}") for k, v in _intkeys(_field(d, "per_index", path), path)}
    return SectionSpace(_int(_field(d, "start", path), path + ".start"), per,
                        _read_graded(_field(d, "generic", path), path + ".generic"),
                        _read_graded(_field(d, "infinity", path), path + ".infinity"))


def encode(obj) -> dict:
    """The JSON-ready dict of an object, with its ``kind``."""
    if isinstance(obj, BurnsideElement):
        return {"kind": "burnside_element", "so2": _rat(obj.so2), "dihedral": _germ(obj.dihedral, _rat)}
    if isinstance(obj, DihedralBurnside):
        return {"kind": "dihedral_burnside", "n": obj.n,
                "coords": [{"type": t, "k": k, "value": _rat(q)} for (t, k), q in obj.coords]}
    if isinstance(obj, EulerClass):
        return {"kind": "euler_class", "exponents": {str(k): e for k, e in obj.exponents}}
    if isinstance(obj, AdmissibleRep):
        return {"kind": "admissible_rep", "chars": list(obj.chars)}
    if isinstance(obj, OFElement):
        return {"kind": "of_element", **_of_element(obj)}
    if isinstance(obj, Presentation):
        return {"kind": "presentation", **_presentation(obj)}
    if isinstance(obj, FpModule):
        return {"kind": "fp_module", **_module(obj)}
    if isinstance(obj, ModuleElement):
        return {"kind": "module_element", "module": _module(obj.module), "degree": obj.degree,
                "coords": _germ(obj.coords, lambda v: [_rat(x) for x in v])}
    if isinstance(obj, Vertex):
        return {"kind": "vertex", **_vertex(obj)}
    if isinstance(obj, CObject):
        return {"kind": "c_object", **_t_object(obj)}
    if isinstance(obj, TObject):
        return {"kind": "t_object", **_t_object(obj)}
    if isinstance(obj, TMap):
        return {"kind": "t_map", "src": _t_object(obj.src), "tgt": _t_object(obj.tgt), "degree": obj.degree,
                "phi": _mat(obj.phi), "theta": _germ(obj.theta, _mat)}
    if isinstance(obj, WideSphereData):
        return {"kind": "wide_sphere_data", "a": [encode(a)["exponents"] for a in obj.a],
                "sigma": [_of_element(s) for s in obj.sigma], "degrees": list(obj.degrees)}
    if isinstance(obj, GradedVec):
        return {"kind": "graded_vec", "dims": _graded(obj)}
    if isinstance(obj, WVec):
        return {"kind": "w_vec", "plus": _graded(obj.plus), "minus": _graded(obj.minus)}
    if isinstance(obj, ChainCx):
        return {"kind": "chain_complex", **_cx(obj)}
    if isinstance(obj, WChainCx):
        return {"kind": "w_chain_complex", **_wcx(obj)}
    if isinstance(obj, DObject):
        return {"kind": "d_object", "stalks": _germ(obj.stalks, _wcx), "infty": _cx(obj.infty),
                "sigma": {str(n): _mat(m) for n, m in obj.sigma.items()}, "bound": obj.bound}
    if isinstance(obj, SectionSpace):
        return {"kind": "section_space", **_section_space(obj)}
    raise TypeError(f"no text format for {type(obj).__name__}")


def _read_euler(d, path: str) -> EulerClass:
    return EulerClass.of({k: _int(e, f"{path}.{k}") for k, e in _intkeys(d, path)})


def _dec_burnside(d, path):
    return BurnsideElement(_read_rat(_field(d, "so2", path), path + ".so2"),
                           _read_germ(_field(d, "dihedral", path), path + ".dihedral", _read_rat))


def _dec_dihedral(d, path):
    coords = {}
    for i, c in enumerate(_list(_field(d, "coords", path), path + ".coords")):
        q = f"{path}.coords[{i}]"
        coords[(_field(c, "type", q), _int(_field(c, "k", q), q))] = _read_rat(_field(c, "value", q), q)
    return DihedralBurnside.of(_int(_field(d, "n", path), path + ".n"), coords)


def _dec_element(d, path):
    module = _read_module(_field(d, "module", path), path + ".module")
    coords = _read_germ(_field(d, "coords", path), path + ".coords",
                        lambda v, p: tuple(_read_rat(x, p) for x in _list(v, p)))
    return ModuleElement(module, _int(_field(d, "degree", path), path + ".degree"), coords)


def _dec_t_map(d, path):
    src = TObject(*_read_t_parts(_field(d, "src", path), path + ".src"))
    tgt = TObject(*_read_t_parts(_field(d, "tgt", path), path + ".tgt"))
    m = TMap(src, tgt, _read_mat(_field(d, "phi", path), path + ".phi"),
             _read_germ(_field(d, "theta", path), path + ".theta", _read_mat),
             _int(_field(d, "degree", path), path + ".degree"))
    m.check()
    return m


def _dec_wide(d, path):
    a = tuple(_read_euler(x, f"{path}.a[{i}]") for i, x in enumerate(_list(_field(d, "a", path), path)))
    sigma = tuple(_read_of_element(x, f"{path}.sigma[{i}]")
                  for i, x in enumerate(_list(_field(d, "sigma", path), path)))
    degs = tuple(_int(x, path + ".degrees") for x in _list(d.get("degrees", []), path + ".degrees"))
    return WideSphereData(a, sigma, degs)


def _dec_d_object(d, path):
    stalks = _read_germ(_field(d, "stalks", path), path + ".stalks", _read_wcx)
    sigma = {n: _read_mat(m, f"{path}.sigma.{n}") for n, m in _intkeys(d.get("sigma", {}), path + ".sigma")}
    obj = DObject(stalks, _read_cx(_field(d, "infty", path), path + ".infty"), sigma)
    if "bound" in d and _int(d["bound"], path + ".bound") < obj.bound:
        raise FormatError(f"stalks vary beyond the stated bound {d['bound']}", path + ".bound")
    return obj


_DECODERS: dict[str, Callable] = {
    "burnside_element": _dec_burnside,
    "dihedral_burnside": _dec_dihedral,
    "euler_class": lambda d, p: _read_euler(_field(d, "exponents", p), p + ".exponents"),
    "admissible_rep": lambda d, p: AdmissibleRep(tuple(_int(x, p) for x in _list(_field(d, "chars", p), p))),
    "of_element": _read_of_element,
    "presentation": _read_presentation,
    "fp_module": _read_module,
    "module_element": _dec_element,
    "vertex": _read_vertex,
    "t_object": lambda d, p: TObject(*_read_t_parts(d, p)),
    "c_object": lambda d, p: CObject(*_read_t_parts(d, p)),
    "t_map": _dec_t_map,
    "wide_sphere_data": _dec_wide,
    "graded_vec": lambda d, p: _read_graded(_field(d, "dims", p), p + ".dims"),
    "w_vec": lambda d, p: WVec(_read_graded(_field(d, "plus", p), p), _read_graded(_field(d, "minus", p), p)),
    "chain_complex": _read_cx,
    "w_chain_complex": _read_wcx,
    "d_object": _dec_d_object,
    "section_space": _read_section_space,
}

KINDS = tuple(_DECODERS)


def decode(data, path: str = "$"):
    """Build an object from its dict.  Schema problems raise FormatError;
    mathematical ones raise the validation error of the relevant module."""
    kind = _field(data, "kind", path)
    if kind not in _DECODERS:
        raise FormatError(f"unknown kind {kind!r}", path + ".kind")
    try:
        return _DECODERS[kind](data, path)
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"malformed {kind}: {exc}", path) from exc


def dumps(obj) -> str:
    return json.dumps(encode(obj) if not isinstance(obj, dict) else obj, indent=2) + "\n"


def loads(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from exc
    return decode(data)


__all__ = ["FormatError", "encode", "decode", "dumps", "loads", "KINDS"]
