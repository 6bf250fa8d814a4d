"""Exercise the Python bindings end to end; exits nonzero on any failure."""

import json
import sys

import burnside

MATRIX_UNITS = """
field GF(2)
matrix
  0 1
  0 0
matrix
  0 0
  1 0
"""

OMEGA = "field GF(2)\nmatrix\n 0 1\n 1 1\n"

DESCENT = "field GF(4)\nsubfield GF(2)\nmatrix\n 0 t\n 0 0\nmatrix\n 0 0\n t+1 0\n"

SQUARE_ZERO = "quaternion\nmatrix\n i j\n -j i\n"


def main():
    assert burnside.describe(MATRIX_UNITS) == ("GF(2)", None, 2, 2)

    report = json.loads(burnside.burnside_check(MATRIX_UNITS))
    assert report["verdict"] == "TheoremInstanceVerified", report["verdict"]
    assert report["conclusion"]["data"]["algebra_dim"] == 4

    report = json.loads(burnside.burnside_check(OMEGA))
    assert report["verdict"] == "HypothesisFails"
    assert report["hypotheses"][0]["witness"]["matrix"] == [["0", "1"], ["1", "1"]]

    analysis = json.loads(burnside.analyze(OMEGA))
    assert analysis["division_degree"] == 2

    descent = burnside.descent_check(DESCENT)
    assert json.loads(descent)["verdict"] == "TheoremInstanceVerified"
    assert burnside.verify("theorem", descent) == []

    tri = json.loads(burnside.triangularize(MATRIX_UNITS))
    assert tri["outcome"]["status"] == "not_triangularizable"

    chain = burnside.chop("field Q\nmatrix\n 1 1\n 0 1\n")
    assert json.loads(chain)["quotient_dims"] == [1, 1]
    assert burnside.verify("chain", chain) == []

    decs = json.loads(burnside.quat_decompose(SQUARE_ZERO))
    assert decs[0]["scalar"] == "0" and len(decs[0]["terms"]) == 1
    assert burnside.verify("decomposition", json.dumps(decs[0])) == []

    try:
        burnside.burnside_check("field Q\nmatrix\n 1/0\n")
    except ValueError as e:
        assert "zero denominator" in str(e)
    else:
        raise AssertionError("expected a parse error")

    print("smoke test passed")


if __name__ == "__main__":
    try:
        main()
    except AssertionError as e:
        print(f"smoke test failed: {e}", file=sys.stderr)
        sys.exit(1)
