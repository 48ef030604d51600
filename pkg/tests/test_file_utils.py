"""
Тесты файловых утилит: формат AFLD1, JSON-артефакты и хэши.
"""

import hashlib
import json
import math

import numpy as np
import pytest

from aniso_ns.spectral.fields import Field
from aniso_ns.utils.file_utils import (
    AFLD_HEADER,
    AFLD_MAGIC,
    AfldFormatError,
    canonical_hash,
    component_path,
    content_hash,
    manifest_entry,
    read_field_afld,
    read_vecfield_afld,
    write_field_afld,
    write_json,
    write_vecfield_afld,
)

from .conftest import random_field, random_solenoidal


class TestAfld:
    """Бинарный формат полей."""

    def test_write_then_read(self, grid16, tmp_path):
        a = random_field(grid16, 11)
        path = write_field_afld(tmp_path / "a.afld", a)
        b = read_field_afld(path)
        assert b.grid == grid16
        assert b.reality
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_byte_layout(self, grid16, tmp_path):
        """Частоты по возрастанию: при n = 16 частота 1 лежит в индексе 8, частота -1 в индексе 6."""
        x1, _, _ = grid16.coordinates()
        a = Field.from_physical(grid16, np.cos(x1))
        data = write_field_afld(tmp_path / "cos.afld", a).read_bytes()

        magic, n1, n2, n3, period_h, period_v = AFLD_HEADER.unpack_from(data)
        assert magic == AFLD_MAGIC
        assert (n1, n2, n3) == (16, 16, 16)
        assert period_h == pytest.approx(2 * math.pi)
        assert len(data) == AFLD_HEADER.size + 16**3 * 16

        payload = np.frombuffer(data, dtype="<c16", offset=AFLD_HEADER.size).reshape(16, 16, 16)
        assert payload[8, 7, 7] == pytest.approx(0.5)
        assert payload[6, 7, 7] == pytest.approx(0.5)
        assert np.sum(np.abs(payload) > 1e-12) == 2

    def test_vecfield_files(self, grid16, tmp_path):
        u = random_solenoidal(grid16, 12)
        paths = write_vecfield_afld(tmp_path, "u final", u)
        assert [p.name for p in paths] == ["u_final_1.afld", "u_final_2.afld", "u_final_3.afld"]
        v = read_vecfield_afld(paths)
        assert np.array_equal(u.stack(), v.stack())

    def test_vecfield_needs_three_components(self, grid16, tmp_path):
        paths = write_vecfield_afld(tmp_path, "u", random_solenoidal(grid16, 13))
        with pytest.raises(AfldFormatError):
            read_vecfield_afld(paths[:2])

    def test_bad_magic(self, grid16, tmp_path):
        path = write_field_afld(tmp_path / "a.afld", random_field(grid16, 14))
        data = bytearray(path.read_bytes())
        data[:8] = b"XXXX0001"
        path.write_bytes(bytes(data))
        with pytest.raises(AfldFormatError, match="сигнатура"):
            read_field_afld(path)

    def test_truncated(self, grid16, tmp_path):
        path = write_field_afld(tmp_path / "a.afld", random_field(grid16, 15))
        path.write_bytes(path.read_bytes()[:-16])
        with pytest.raises(AfldFormatError):
            read_field_afld(path)

    def test_shorter_than_header(self, tmp_path):
        path = tmp_path / "short.afld"
        path.write_bytes(AFLD_MAGIC)
        with pytest.raises(AfldFormatError, match="заголовка"):
            read_field_afld(path)

    def test_unequal_horizontal_sizes(self, tmp_path):
        path = tmp_path / "bad.afld"
        header = AFLD_HEADER.pack(AFLD_MAGIC, 16, 8, 16, 2 * math.pi, 2 * math.pi)
        path.write_bytes(header + bytes(16 * 8 * 16 * 16))
        with pytest.raises(AfldFormatError, match="горизонтальные"):
            read_field_afld(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(AfldFormatError):
            read_field_afld(tmp_path / "missing.afld")

    def test_complex_field_keeps_reality_flag(self, grid16, tmp_path):
        coeffs = np.zeros(grid16.shape, dtype=complex)
        coeffs[1, 0, 0] = 1.0
        path = write_field_afld(tmp_path / "mode.afld", Field(grid16, coeffs, reality=False))
        assert not read_field_afld(path).reality


class TestJson:
    """JSON-артефакты и хэши."""

    def test_canonical_hash_ignores_key_order(self):
        assert canonical_hash({"a": 1, "b": [1, 2]}) == canonical_hash({"b": [1, 2], "a": 1})
        assert canonical_hash({"a": 1}) != canonical_hash({"a": 2})

    def test_non_finite_written_as_null(self, tmp_path):
        path = write_json(tmp_path / "out" / "r.json", {"lhs": math.inf, "nested": [math.nan, 1.0]})
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload == {"lhs": None, "nested": [None, 1.0]}

    def test_deterministic_bytes(self, tmp_path):
        first = write_json(tmp_path / "a.json", {"b": 1, "a": 2}).read_bytes()
        second = write_json(tmp_path / "b.json", {"a": 2, "b": 1}).read_bytes()
        assert first == second

    def test_content_hash_depends_on_files(self, tmp_path):
        path = tmp_path / "input.afld"
        path.write_bytes(b"one")
        before = content_hash({"x": 1}, [path])
        path.write_bytes(b"two")
        assert content_hash({"x": 1}, [path]) != before
        assert content_hash({"x": 1}) != before


class TestArtifactPaths:
    """Пути компонент и записи манифеста."""

    def test_component_path(self, tmp_path):
        assert component_path(tmp_path, "u final:1/2", 3) == tmp_path / "u_final_1_2_3.afld"
        assert component_path(tmp_path, "ubar_final", 1).name == "ubar_final_1.afld"

    @pytest.mark.parametrize("prefix, index", [("", 1), ("///", 1), ("u", 0), ("u", 4)])
    def test_component_path_rejects(self, tmp_path, prefix, index):
        with pytest.raises(AfldFormatError):
            component_path(tmp_path, prefix, index)

    def test_manifest_entry(self, tmp_path):
        path = tmp_path / "checkpoints" / "f.bin"
        path.parent.mkdir()
        path.write_bytes(b"12345")
        entry = manifest_entry(path, tmp_path)
        assert entry["path"] == "checkpoints/f.bin"
        assert entry["bytes"] == 5
        assert entry["sha256"] == hashlib.sha256(b"12345").hexdigest()

    def test_manifest_entry_missing_or_outside(self, tmp_path):
        with pytest.raises(AfldFormatError):
            manifest_entry(tmp_path / "missing", tmp_path)
        outside = tmp_path / "f.bin"
        outside.write_bytes(b"1")
        with pytest.raises(AfldFormatError):
            manifest_entry(outside, tmp_path / "out")
