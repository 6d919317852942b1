import json
import math

import _frontlab as fl


def test_gallery_list():
    names = fl.gallery_list()
    assert "swallowtail" in names
    assert len(names) == 10


def test_trace_and_classify_swallowtail():
    view = fl.load_gallery("swallowtail")
    assert view.name == "swallowtail"
    locus = fl.trace_singular_set(view)
    assert len(locus.points) == 1
    pt = locus.points[0]
    assert pt.verdict == fl.Verdict.A3
    assert math.hypot(pt.point.u, pt.point.v) < 1e-6


def test_lambda_and_kappa_s_cuspidal_edge():
    view = fl.load_gallery("cuspidal-edge")
    assert abs(view.lambda_(0.0, 0.3)) < 1e-12
    assert view.lambda_(0.5, 0.0) != 0.0
    locus = fl.trace_singular_set(view)
    assert len(locus.curves) == 1
    ks = fl.singular_curvature(view, locus.curves[0])
    assert max(abs(k) for k in ks) < 1e-9


def test_global_gb_torus():
    view = fl.load_gallery("torus-immersed")
    report = fl.verify_global_GB(view, 48)
    assert report.passed
    assert abs(report.KdA.value) < 1e-7
    assert abs(report.chi_E) < 1e-7


def test_report_json_parses():
    view = fl.load_gallery("cuspidal-edge")
    doc = json.loads(fl.analyze_report_json(view))
    assert doc["schema"] == "frontlab-analyze/1"
    assert doc["surface"] == "cuspidal-edge"
    assert len(doc["singular_curves"]) == 1
