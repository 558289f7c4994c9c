"""Smoke test for the quasiconf Python bindings.

Build first:  pip install --no-build-isolation -e crates/py
"""
import quasiconf as qc


def main():
    names = qc.catalog_names()
    assert "13_34" in names, names

    s = qc.Structure.catalog("13_34")
    assert (s.num_points, s.num_lines, s.incidences) == (13, 13, 48)
    assert s.is_34_configuration()
    assert s.faithfulness().faithful
    print(s, s.signature())

    sig = qc.Signature("4*x^3+9*x^4|4*y^3+9*y^4")
    assert sig == s.signature()
    lhs, ok = sig.obstruction()
    assert ok

    assert qc.b_min(4) == 9
    assert qc.infeasible_small_n34(8)[0] and not qc.infeasible_small_n34(9)[0]
    assert qc.count(qc.Signature.regular(7, 3)) == 1

    fano = qc.enumerate(qc.Signature.regular(7, 3))[0]
    assert fano.automorphism_group_order() == 168
    assert fano.dual().is_isomorphic(fano)

    again = qc.Structure.from_json(s.to_json())
    assert again.canonical_form() == s.canonical_form()

    four = s.three_four_to_four(seed=0)
    assert four.is_k_configuration(4) and four.faithfulness().faithful
    print(four)

    svg = s.render_svg()
    assert svg.startswith("<svg") or svg.startswith("<?xml")

    try:
        qc.Signature("nonsense")
    except ValueError:
        pass
    else:
        raise AssertionError("bad signature accepted")

    print("python smoke test ok")


if __name__ == "__main__":
    main()
