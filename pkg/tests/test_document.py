import numpy as np
import pytest

import nurbskit as nk
from nurbskit import (
    DocumentParseError,
    DocumentValidationError,
    GeometryDocument,
    NurbsCurve,
    NurbsSurface,
    TrimmedSurface,
    dumps,
    load,
    loads,
    save,
)
from nurbskit.basis import BasisSpec, KnotVector
from nurbskit.geometry import TrimMap

LINE_DOC = """nurbskit 1

curve c
dim 3
degree 1
knots 0 0 1 1
point 0 0 0 1
point 2 4 6 1
end
"""


def square_trim_text(name="t"):
    return (
        f"trim {name}\n"
        "dim 2\n"
        "degree 1 1\n"
        "knots_xi 0 0 1 1\n"
        "knots_eta 0 0 1 1\n"
        "shape 2 2\n"
        "point 0 0 1\n"
        "point 0 0.5 1\n"
        "point 1 0 1\n"
        "point 1 0.5 1\n"
        "end\n"
    )


def bilinear_surface_text(name="s"):
    return (
        f"surface {name}\n"
        "dim 3\n"
        "degree 1 1\n"
        "knots_xi 0 0 1 1\n"
        "knots_eta 0 0 1 1\n"
        "shape 2 2\n"
        "point 0 0 0 1\n"
        "point 0 1 0 1\n"
        "point 1 0 0 1\n"
        "point 1 1 2 1\n"
        "end\n"
    )


def demo_document():
    doc = GeometryDocument()
    shell = nk.quarter_cylinder_shell()
    doc.add("shell", shell)
    arc = NurbsCurve(
        BasisSpec(
            KnotVector([0.0, 0.0, 0.0, 1.0, 1.0, 1.0]),
            2,
            np.array([1.0, 1 / 3, 1.0]),
        ),
        np.array([[0.0, 0.0, 0.0], [0.1, 0.9, 1 / 7], [1.0, 0.7, 0.3]]),
    )
    doc.add("edge", arc)
    boundary = NurbsCurve(
        BasisSpec(KnotVector([0.0, 0.0, 0.0, 1.0, 1.0, 1.0]), 2),
        np.array([[0.0, 0.5], [0.5, 0.9], [1.0, 0.5]]),
    )
    trim = nk.ruled_trim_map(boundary, (0.0, 0.0), (1.0, 0.0))
    doc.add("cut", trim)
    doc.add("panel", TrimmedSurface(shell, trim))
    doc.add("samples", np.array([[0.0, 0.25, 0.5], [1 / 7, 2 / 3, 0.9]]))
    return doc


class TestGeometryDocument:
    def test_add_and_get(self):
        doc = GeometryDocument()
        shell = doc.add("shell", nk.quarter_cylinder_shell())
        assert doc.get("shell") is shell
        assert doc.get("shell", NurbsSurface) is shell
        assert "shell" in doc
        assert len(doc) == 1
        assert doc.name_of(shell) == "shell"
        assert doc.name_of(nk.quarter_cylinder_shell()) is None

    def test_get_missing_entity(self):
        with pytest.raises(DocumentValidationError, match="no such entity") as err:
            GeometryDocument().get("ghost")
        assert err.value.entity == "ghost"

    def test_get_with_wrong_kind(self):
        doc = GeometryDocument()
        doc.add("shell", nk.quarter_cylinder_shell())
        with pytest.raises(DocumentValidationError, match="expected NurbsCurve"):
            doc.get("shell", NurbsCurve)

    def test_rejects_duplicate_names(self):
        doc = GeometryDocument()
        doc.add("a", nk.quarter_cylinder_shell())
        with pytest.raises(DocumentValidationError, match="duplicate"):
            doc.add("a", nk.quarter_cylinder_shell())

    def test_rejects_bad_names(self):
        doc = GeometryDocument()
        for name in ("", "two words", "sla/sh", "hash#tag"):
            with pytest.raises(DocumentValidationError):
                doc.add(name, nk.quarter_cylinder_shell())
        doc.add("ok-name_1.2:b", nk.quarter_cylinder_shell())

    def test_rejects_foreign_types(self):
        with pytest.raises(DocumentValidationError, match="unsupported entity type"):
            GeometryDocument().add("x", "not geometry")

    def test_point_sets_are_copied_and_frozen(self):
        doc = GeometryDocument()
        src = np.zeros((3, 2))
        stored = doc.add("pts", src)
        src[0, 0] = 9.0
        assert stored[0, 0] == 0.0
        with pytest.raises(ValueError):
            stored[0, 0] = 1.0

    def test_rejects_bad_point_arrays(self):
        doc = GeometryDocument()
        with pytest.raises(DocumentValidationError, match=r"\(m, 2\|3\)"):
            doc.add("flat", np.zeros(4))
        with pytest.raises(DocumentValidationError):
            doc.add("wide", np.zeros((4, 5)))


class TestLoads:
    def test_curve_block(self):
        doc = loads(LINE_DOC)
        curve = doc.get("c", NurbsCurve)
        assert curve.degree == 1
        np.testing.assert_allclose(curve.point(0.5), [1.0, 2.0, 3.0])
        np.testing.assert_allclose(curve.basis.weights_or_ones(), [1.0, 1.0])

    def test_surface_block(self):
        doc = loads("nurbskit 1\n" + bilinear_surface_text())
        surf = doc.get("s", NurbsSurface)
        np.testing.assert_allclose(surf.point(0.5, 0.5), [0.5, 0.5, 0.5])

    def test_knots_normalize_to_unit_interval(self):
        text = LINE_DOC.replace("knots 0 0 1 1", "knots 2 2 6 6")
        curve = loads(text).get("c")
        np.testing.assert_array_equal(curve.basis.knots.values, [0, 0, 1, 1])

    def test_comments_and_blank_lines_ignored(self):
        text = LINE_DOC.replace(
            "dim 3", "# a full-line comment\n\ndim 3   # trailing comment"
        )
        np.testing.assert_allclose(loads(text).get("c").point(0.5), [1, 2, 3])

    def test_rational_weights_survive(self):
        text = LINE_DOC.replace("point 2 4 6 1", "point 2 4 6 0.25")
        curve = loads(text).get("c")
        np.testing.assert_array_equal(curve.basis.weights_or_ones(), [1.0, 0.25])

    def test_trim_and_trimmed_blocks(self):
        text = (
            "nurbskit 1\n"
            + bilinear_surface_text()
            + square_trim_text()
            + "trimmed cut\nbase s\nmap t\nend\n"
        )
        doc = loads(text)
        trim = doc.get("t", TrimMap)
        cut = doc.get("cut", TrimmedSurface)
        assert cut.base is doc.get("s")
        assert cut.trim is trim
        uv = trim.eval(0.5, 1.0)
        np.testing.assert_allclose(cut.point(0.5, 1.0), doc.get("s").point(*uv))

    def test_trimmed_may_come_before_its_parts(self):
        text = (
            "nurbskit 1\n"
            + "trimmed cut\nbase s\nmap t\nend\n"
            + bilinear_surface_text()
            + square_trim_text()
        )
        doc = loads(text)
        assert isinstance(doc.get("cut"), TrimmedSurface)
        assert list(doc.entities) == ["cut", "s", "t"]

    def test_points_block(self):
        text = "nurbskit 1\npoints p\ndim 2\npoint 0 1\npoint 0.5 0.25\nend\n"
        arr = loads(text).get("p", np.ndarray)
        np.testing.assert_array_equal(arr, [[0, 1], [0.5, 0.25]])
        assert not arr.flags.writeable


class TestParseErrors:
    def check(self, text, line, match):
        with pytest.raises(DocumentParseError, match=match) as err:
            loads(text)
        assert err.value.line == line

    def test_missing_header(self):
        self.check("curve c\nend\n", 1, "expected header")
        self.check("", 0, "expected header")

    def test_unknown_entity_type(self):
        self.check("nurbskit 1\nblob b\nend\n", 2, "unknown entity type 'blob'")

    def test_block_start_needs_one_name(self):
        self.check("nurbskit 1\ncurve\nend\n", 2, "expected 'curve <name>'")
        self.check("nurbskit 1\ncurve a b\nend\n", 2, "expected 'curve <name>'")

    def test_invalid_entity_name(self):
        self.check("nurbskit 1\ncurve b@d\nend\n", 2, "invalid entity name")

    def test_bad_number_reports_its_line(self):
        bad = LINE_DOC.replace("point 2 4 6 1", "point 2 four 6 1")
        self.check(bad, 8, "'four' is not a number")

    def test_bad_integer_reports_its_line(self):
        bad = LINE_DOC.replace("degree 1", "degree x")
        self.check(bad, 5, "'x' is not an integer")

    def test_missing_end(self):
        self.check("nurbskit 1\ncurve c\ndim 3\n", 2, "missing its 'end' line")

    def test_end_takes_no_arguments(self):
        bad = LINE_DOC.replace("end", "end now")
        self.check(bad, 9, "'end' takes no arguments")

    def test_duplicate_field(self):
        bad = LINE_DOC.replace("degree 1", "degree 1\ndegree 1")
        self.check(bad, 6, "duplicate field 'degree'")

    def test_unknown_field(self):
        bad = LINE_DOC.replace("dim 3", "span 3")
        self.check(bad, 4, "unknown field 'span' in a 'curve' block")

    def test_reference_fields_take_one_name(self):
        text = "nurbskit 1\ntrimmed x\nbase a b\nmap t\nend\n"
        self.check(text, 3, "'base' expects one entity name")

    def test_point_width_reports_its_line(self):
        bad = LINE_DOC.replace("point 2 4 6 1", "point 2 4")
        self.check(bad, 8, "point expects 4 values, got 2")


class TestValidationErrors:
    def check(self, text, entity, match):
        with pytest.raises(DocumentValidationError, match=match) as err:
            loads(text)
        assert err.value.entity == entity

    def test_decreasing_knots_name_the_entity(self):
        bad = LINE_DOC.replace("knots 0 0 1 1", "knots 0 1 0.5 1")
        self.check(bad, "c", "non-decreasing")

    def test_unclamped_knots_name_the_entity(self):
        bad = LINE_DOC.replace("degree 1", "degree 2")
        self.check(bad, "c", "not clamped")

    def test_missing_field(self):
        bad = LINE_DOC.replace("degree 1\n", "")
        self.check(bad, "c", "missing required field 'degree'")

    def test_field_count(self):
        bad = LINE_DOC.replace("dim 3", "dim 3 3")
        self.check(bad, "c", "field 'dim' expects 1 value")

    def test_curve_dim_range(self):
        bad = LINE_DOC.replace("dim 3", "dim 4")
        self.check(bad, "c", "curve dim must be 2 or 3")

    def test_curve_needs_points(self):
        bad = "nurbskit 1\ncurve c\ndim 3\ndegree 1\nknots 0 0 1 1\nend\n"
        self.check(bad, "c", "no control points")

    def test_trim_must_be_2d(self):
        bad = "nurbskit 1\n" + square_trim_text().replace("dim 2", "dim 3")
        with pytest.raises(DocumentValidationError, match="trim dim must be 2"):
            loads(bad)

    def test_trim_image_must_stay_in_unit_square(self):
        bad = "nurbskit 1\n" + square_trim_text().replace(
            "point 1 0.5 1", "point 1 1.5 1"
        )
        self.check(bad, "t", "unit square")

    def test_surface_point_count(self):
        bad = "nurbskit 1\n" + bilinear_surface_text().replace("point 1 1 2 1\n", "")
        self.check(bad, "s", "shape 2 x 2 needs 4 points, got 3")

    def test_duplicate_entities(self):
        self.check(LINE_DOC + LINE_DOC.split("\n", 2)[2], "c", "duplicate entity name")

    def test_trimmed_missing_reference(self):
        text = "nurbskit 1\n" + bilinear_surface_text() + "trimmed x\nbase s\nmap t\nend\n"
        self.check(text, "t", "no such entity")

    def test_trimmed_wrong_reference_kind(self):
        text = (
            "nurbskit 1\n"
            + bilinear_surface_text()
            + square_trim_text()
            + "trimmed x\nbase t\nmap t\nend\n"
        )
        self.check(text, "t", "expected NurbsSurface, found TrimMap")

    def test_trimmed_takes_no_points(self):
        text = "nurbskit 1\ntrimmed x\nbase s\nmap t\npoint 0 0 0\nend\n"
        self.check(text, "x", "no point lines")

    def test_empty_point_set(self):
        self.check("nurbskit 1\npoints p\ndim 2\nend\n", "p", "empty")


class TestSaveRoundtrip:
    def test_dumps_loads_dumps_is_identity(self):
        text1 = dumps(demo_document())
        text2 = dumps(loads(text1))
        assert text1 == text2

    def test_save_load_file(self, tmp_path):
        doc = demo_document()
        path = tmp_path / "demo.nkt"
        written = save(doc, path)
        assert path.read_text(encoding="utf-8") == written
        doc2 = load(path)
        assert list(doc2.entities) == list(doc.entities)
        assert dumps(doc2) == written

    def test_numbers_roundtrip_exactly(self):
        doc = demo_document()
        doc2 = loads(dumps(doc))
        arc, arc2 = doc.get("edge"), doc2.get("edge")
        np.testing.assert_array_equal(arc.control_points, arc2.control_points)
        np.testing.assert_array_equal(
            arc.basis.weights_or_ones(), arc2.basis.weights_or_ones()
        )
        np.testing.assert_array_equal(doc.get("samples"), doc2.get("samples"))

    def test_entity_order_is_preserved(self):
        doc = demo_document()
        assert list(loads(dumps(doc)).entities) == list(doc.entities)

    def test_trimmed_requires_parts_in_document(self):
        doc = GeometryDocument()
        shell = nk.quarter_cylinder_shell()
        arc = NurbsCurve(
            BasisSpec(KnotVector([0.0, 0.0, 1.0, 1.0]), 1),
            np.array([[0.0, 0.5], [1.0, 0.5]]),
        )
        trim = nk.ruled_trim_map(arc, (0.0, 0.0), (1.0, 0.0))
        doc.add("panel", TrimmedSurface(shell, trim))
        with pytest.raises(DocumentValidationError, match="not in"):
            dumps(doc)

    def test_unit_weights_are_written_explicitly(self):
        text = dumps(loads(LINE_DOC))
        assert "point 0 0 0 1\n" in text
        assert loads(text).get("c").basis.weights is None
