"""Directory serialization of decompositions and factorizations.

Each object is a directory holding ``manifest.txt`` (``key: value`` lines)
plus one CSV per array. Floats are written in shortest round-trip form, so
reloading reproduces every array bit for bit.
"""

from pathlib import Path

import numpy as np

from ._linalg import frozen
from .baseline import BaselineTsvd
from .exceptions import ParseError
from .fileio import atomic_write_text, format_float, read_csv_matrix, write_csv_matrix
from .kron_core import KronPair
from .ksum import KroneckerSum
from .tsvd import FactorSvd, ImplicitTsvd, SawbladePermutation

__all__ = [
    "save_kron_sum",
    "load_kron_sum",
    "save_tsvd",
    "load_tsvd",
    "load_any_tsvd",
    "serialized_entry_count",
    "largest_serialized_field",
]

_FSVD = ("u_a", "s_a", "v_a", "u_b", "s_b", "v_b")
_VECTORS = {"s_a", "s_b", "s_t", "sigma_hat", "perm_map", "perm_inverse", "perm_by_magnitude"}
_INTS = {"perm_map", "perm_inverse", "perm_by_magnitude"}


def _write_manifest(path, items):
    lines = [f"{key}: {value}" for key, value in items]
    atomic_write_text(Path(path) / "manifest.txt", "\n".join(lines) + "\n")


def read_manifest(path):
    path = Path(path)
    mpath = path / "manifest.txt"
    if not mpath.is_file():
        raise FileNotFoundError(f"no manifest.txt in {path}")
    out = {}
    for lineno, line in enumerate(mpath.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        if ":" not in line:
            raise ParseError("expected 'key: value'", path=mpath, line=lineno)
        key, value = line.split(":", 1)
        out[key.strip()] = value.strip()
    return out


def _require(manifest, key, path):
    if key not in manifest:
        raise ParseError(f"manifest lacks {key!r}", path=Path(path) / "manifest.txt")
    return manifest[key]


def _save_arrays(path, arrays):
    for name, arr in arrays.items():
        write_csv_matrix(Path(path) / f"{name}.csv", arr)


def _load_array(path, name):
    dtype = np.int64 if name in _INTS else np.float64
    arr = read_csv_matrix(Path(path) / f"{name}.csv", dtype=dtype)
    if name in _VECTORS:
        arr = arr.ravel()
    return frozen(arr)


def save_kron_sum(path, ksum):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    _write_manifest(path, [
        ("kind", "kronecker_sum"),
        ("n", ksum.n),
        ("r", ksum.r),
        ("kron_rank_full", "" if ksum.kron_rank_full is None else ksum.kron_rank_full),
        ("weights", ",".join(format_float(w) for w in ksum.weights)),
    ])
    write_csv_matrix(path / "weights.csv", ksum.weights)
    for i, term in enumerate(ksum.terms):
        write_csv_matrix(path / f"term_{i:03d}_a.csv", term.a)
        write_csv_matrix(path / f"term_{i:03d}_b.csv", term.b)


def load_kron_sum(path):
    path = Path(path)
    man = read_manifest(path)
    if man.get("kind") != "kronecker_sum":
        raise ParseError(f"not a Kronecker sum (kind={man.get('kind')!r})", path=path / "manifest.txt")
    r = int(_require(man, "r", path))
    weights = np.array([float(w) for w in _require(man, "weights", path).split(",")])
    full = man.get("kron_rank_full", "")
    terms = tuple(
        KronPair(read_csv_matrix(path / f"term_{i:03d}_a.csv"), read_csv_matrix(path / f"term_{i:03d}_b.csv"))
        for i in range(r)
    )
    ksum = KroneckerSum(terms, weights, int(full) if full else None)
    if ksum.n != int(_require(man, "n", path)):
        raise ParseError("manifest n disagrees with term files", path=path / "manifest.txt")
    return ksum


def _tsvd_arrays(obj):
    f = obj.fsvd
    arrays = {name: getattr(f, name) for name in _FSVD}
    if isinstance(obj, ImplicitTsvd):
        arrays.update(
            perm_map=obj.perm.map,
            perm_inverse=obj.perm.inverse_map,
            u_t=obj.u_t,
            s_t=obj.s_t,
            v_t=obj.v_t,
        )
    elif isinstance(obj, BaselineTsvd):
        arrays.update(sigma_hat=obj.sigma_hat, perm_by_magnitude=obj.perm_by_magnitude)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return arrays


def save_tsvd(path, obj):
    """Save an :class:`ImplicitTsvd` or :class:`BaselineTsvd`."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    arrays = _tsvd_arrays(obj)
    if isinstance(obj, ImplicitTsvd):
        items = [("kind", "implicit_tsvd"), ("n", obj.n), ("k", obj.k)]
    else:
        items = [("kind", "baseline_tsvd"), ("n", obj.n)]
    items.append(("arrays", ",".join(arrays)))
    _save_arrays(path, arrays)
    _write_manifest(path, items)


def load_any_tsvd(path):
    path = Path(path)
    man = read_manifest(path)
    kind = man.get("kind")
    fsvd = FactorSvd(*(_load_array(path, name) for name in _FSVD))
    if kind == "implicit_tsvd":
        perm = SawbladePermutation(_load_array(path, "perm_map"), _load_array(path, "perm_inverse"))
        return ImplicitTsvd(
            fsvd, perm, int(_require(man, "k", path)),
            _load_array(path, "u_t"), _load_array(path, "s_t"), _load_array(path, "v_t"),
        )
    if kind == "baseline_tsvd":
        return BaselineTsvd(fsvd, _load_array(path, "sigma_hat"), _load_array(path, "perm_by_magnitude"))
    raise ParseError(f"unknown factorization kind {kind!r}", path=path / "manifest.txt")


load_tsvd = load_any_tsvd


def serialized_entry_count(obj):
    """Total number of stored numbers; the storage contract is ``O(n**2 + k**2)``."""
    return int(sum(np.asarray(a).size for a in _tsvd_arrays(obj).values()))


def largest_serialized_field(obj):
    name, arr = max(_tsvd_arrays(obj).items(), key=lambda kv: np.asarray(kv[1]).size)
    return name, int(np.asarray(arr).size)
