from fractions import Fraction

import pytest

from tropcount.records import (
    EffectivityRecord,
    EvaluationSpaceRecord,
    GammaRubRecord,
    MarkingRecord,
    OracleRecord,
    Record,
    SolutionRecord,
    SupportRecord,
    TotalRecord,
    decode_json_lines,
    encode_json_line,
    format_text,
)

CURVE = "vertex a\nleg a marking 1 slope 1\nleg a marking 2 slope -1\n"


def test_total_record_json():
    record = TotalRecord(command="hurwitz", seed=0, total=Fraction(1, 2), solutions=2)
    assert encode_json_line(record) == b'{"kind":"total","command":"hurwitz","seed":0,"total":"1/2","solutions":2,"attempt":0}\n'


def test_json_lines_decode_to_the_same_records():
    records = [
        SolutionRecord(command="severi", seed=3, index=1, multiplicity=Fraction(4), curve=CURVE),
        TotalRecord(command="severi", seed=3, total=Fraction(12), solutions=9, attempt=1),
        OracleRecord(command="severi", seed=3, oracle="wdvv", expected=Fraction(12), found=Fraction(12)),
        EffectivityRecord(command="effectivity", seed=0, phi=((1, 0), (0, 1)), injective=True, cokernel_free=True, effective=True, vacuous=False),
        EvaluationSpaceRecord(
            command="evalspace",
            seed=0,
            markings=(MarkingRecord(marking=1, stratum=((0, 1), (1, 0)), quotient_rank=0), MarkingRecord(marking=2, stratum=None, quotient_rank=2)),
            product_rank=2,
            rubber_rank=None,
        ),
        GammaRubRecord(
            command="gammarub",
            seed=0,
            polynomial="chamber-dependent\n",
            total_degree=8,
            linear_factors=6,
            chamber_dependent=True,
            value=None,
            interpolation_consistent=True,
            experimental=False,
        ),
        SupportRecord(command="gammarub", seed=0, curve=CURVE, total_degree=8, chamber_dependent=False),
    ]
    data = b"".join(encode_json_line(r) for r in records)
    assert data.count(b"\n") == len(records)
    assert decode_json_lines(data + b"\n") == records


def test_rationals_are_never_floats():
    data = encode_json_line(SolutionRecord(command="hurwitz", seed=0, index=2, multiplicity=Fraction(1, 6), curve=CURVE))
    assert b'"multiplicity":"1/6"' in data
    assert b"0.16" not in data


@pytest.mark.parametrize(
    "record,text",
    (
        pytest.param(
            SolutionRecord(command="hurwitz", seed=0, index=1, multiplicity=Fraction(1, 2), curve=CURVE),
            "solution 1: multiplicity 1/2\n    vertex a\n    leg a marking 1 slope 1\n    leg a marking 2 slope -1\n",
            id="solution",
        ),
        pytest.param(
            TotalRecord(command="severi", seed=4, total=Fraction(12), solutions=9, attempt=2),
            "total 12 from 9 solutions (seed 4, attempt 2)\n",
            id="total",
        ),
        pytest.param(
            OracleRecord(command="hurwitz", seed=0, oracle="hurwitz", expected=Fraction(4), found=Fraction(4)),
            "oracle hurwitz: expected 4, found 4: ok\n",
            id="oracle-ok",
        ),
        pytest.param(
            OracleRecord(command="severi", seed=1, oracle="wdvv", expected=Fraction(12), found=Fraction(11)),
            "oracle wdvv: expected 12, found 11: MISMATCH\n",
            id="oracle-mismatch",
        ),
        pytest.param(
            EffectivityRecord(command="effectivity", seed=0, phi=((1, 0), (0, 1)), injective=True, cokernel_free=True, effective=True, vacuous=False),
            "phi:\n    1 0\n    0 1\ninjective: yes\ncokernel free after saturation: yes\neffective\n",
            id="effective",
        ),
        pytest.param(
            EffectivityRecord(command="effectivity", seed=0, phi=((1, 1),), injective=False, cokernel_free=True, effective=False, vacuous=False),
            "phi:\n    1 1\ninjective: no\ncokernel free after saturation: yes\nNOT effective\n",
            id="not-effective",
        ),
        pytest.param(
            EffectivityRecord(command="effectivity", seed=0, phi=(), injective=True, cokernel_free=True, effective=True, vacuous=True),
            "phi:\ninjective: yes\ncokernel free after saturation: yes\neffective (vacuous)\n",
            id="vacuous",
        ),
        pytest.param(
            EvaluationSpaceRecord(
                command="evalspace",
                seed=0,
                markings=(MarkingRecord(marking=1, stratum=((0, 1), (1, 0)), quotient_rank=0), MarkingRecord(marking=2, stratum=None, quotient_rank=2)),
                product_rank=2,
                rubber_rank=None,
            ),
            "marking 1: stratum of (0 1), (1 0), rank 0\nmarking 2: whole target, rank 2\nproduct rank 2\nrubber rank n/a (not effective)\n",
            id="evalspace",
        ),
        pytest.param(
            GammaRubRecord(
                command="gammarub",
                seed=0,
                polynomial="term 3 e1\n",
                total_degree=1,
                linear_factors=1,
                chamber_dependent=False,
                value=Fraction(3, 2),
                interpolation_consistent=True,
                experimental=True,
            ),
            "gamma_rub (experimental):\n    term 3 e1\ntotal degree 1, 1 linear factors\nvalue at file lengths 3/2\ninterpolation consistent: yes\n",
            id="gammarub",
        ),
        pytest.param(
            SupportRecord(command="gammarub", seed=0, curve="vertex a\n", total_degree=0, chamber_dependent=True),
            "support type (chamber-dependent):\n    vertex a\n",
            id="support",
        ),
    ),
)
def test_format_text(record, text):
    assert format_text(record) == text


def test_bare_records_have_no_text_form():
    with pytest.raises(TypeError):
        format_text(Record(command="severi", seed=0))
