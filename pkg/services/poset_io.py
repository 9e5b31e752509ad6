"""
poset_io.py — JSON and DOT import/export for face posets.

JSON layout:
    {"faces": [{"id": 0, "rank": -1}, {"id": 1, "rank": 0}, ...],
     "covers": [[1, 0], [2, 0], [3, 1], [3, 2]]}
Face ids are dense (0..count-1, any order in the file); covers are
(upper, lower) pairs of face ids.  Relative output paths land in
data/ (gitignored), or in $DATA_DIR when set.

Concurrency notes
-----------------
save() holds a per-path threading.Lock and writes to a temporary file first,
then replaces the target atomically (os.replace), so a crash mid-write cannot
leave a truncated JSON file behind.
"""

import json
import logging
import os
import tempfile
import threading
from pathlib import Path

from services.poset_core import FacePoset, build_poset

log = logging.getLogger(__name__)

_DATA_DIR = Path(os.environ.get("DATA_DIR") or Path(__file__).parent.parent / "data")

_locks: dict[Path, threading.Lock] = {}
_locks_meta = threading.Lock()   # guards the _locks dict itself


def _get_lock(path: Path) -> threading.Lock:
    with _locks_meta:
        if path not in _locks:
            _locks[path] = threading.Lock()
        return _locks[path]


def _resolve(path: str | Path) -> Path:
    path = Path(path)
    return path if path.is_absolute() else _DATA_DIR / path


def _save(path: Path, text: str) -> None:
    """Atomically write text to path via a temp file + os.replace."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except Exception:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def to_json(poset: FacePoset) -> dict:
    return {
        "faces": [{"id": i, "rank": r} for i, r in enumerate(poset.ranks)],
        "covers": [[u, l] for u, l in poset.covers],
    }


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def from_json(data: dict) -> FacePoset:
    """
    Inverse of to_json.  Raises ValueError on a malformed document and the
    poset_core build errors (DanglingId, CyclicCovers, NonHasseCover) on a
    well-formed document that is not a ranked poset.
    """
    if not isinstance(data, dict) or not isinstance(data.get("faces"), list):
        raise ValueError("poset JSON must be an object with a 'faces' list")
    faces = data["faces"]
    covers = data.get("covers", [])
    if not all(isinstance(f, dict) and _is_int(f.get("id")) and _is_int(f.get("rank")) for f in faces):
        raise ValueError("each face must be an object with integer 'id' and 'rank'")
    ranks_by_id = {f["id"]: f["rank"] for f in faces}
    if len(ranks_by_id) != len(faces) or set(ranks_by_id) != set(range(len(faces))):
        raise ValueError(f"face ids must be exactly 0..{len(faces) - 1} with no gaps or repeats")
    if not isinstance(covers, list) or not all(
        isinstance(c, list) and len(c) == 2 and all(_is_int(x) for x in c) for c in covers
    ):
        raise ValueError("'covers' must be a list of [upper, lower] integer pairs")
    ranks = [ranks_by_id[i] for i in range(len(faces))]
    return build_poset(ranks, [tuple(c) for c in covers])


def load(path: str | Path) -> FacePoset:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, OSError) as e:
        log.warning("could not read %s: %s", path, e)
        raise ValueError(f"could not read {path}: {e}") from e
    return from_json(data)


def save(path: str | Path, poset: FacePoset) -> Path:
    """Write poset as JSON; returns the resolved path."""
    target = _resolve(path)
    with _get_lock(target):
        _save(target, json.dumps(to_json(poset), indent=2) + "\n")
    return target


def save_text(path: str | Path, text: str) -> Path:
    target = _resolve(path)
    with _get_lock(target):
        _save(target, text)
    return target


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------

def to_dot(poset: FacePoset, name: str = "P") -> str:
    """Hasse diagram in Graphviz DOT: nodes labelled id:rank, one rank per row, edges upwards."""
    lines = [f'digraph "{name}" {{', "  rankdir=BT;", "  node [shape=circle];"]
    for i, r in enumerate(poset.ranks):
        lines.append(f'  "{i}" [label="{i}:{r}"];')
    for r in sorted(set(poset.ranks)):
        ids = " ".join(f'"{i}";' for i in poset.faces_of_rank(r))
        lines.append(f"  {{ rank=same; {ids} }}  // rank {r}")
    for u, l in poset.covers:
        lines.append(f'  "{l}" -> "{u}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
