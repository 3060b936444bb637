"""
Driving the command line: JSON in, certified JSON out
=====================================================

"""

import json
import pathlib
import tempfile

from jordanforge.cli import main

workdir = pathlib.Path(tempfile.mkdtemp(prefix="jordanforge-demo-"))

# A Jordan-block-plus-diagonal matrix as the CLI sees it: decimal strings,
# never floats.
matrix_doc = {
    "kind": "int_matrix",
    "entries": [["1", "1", "0"], ["0", "1", "0"], ["0", "0", "2"]],
}
inp = workdir / "matrix.json"
out = workdir / "jnf.json"
inp.write_text(json.dumps(matrix_doc))

rc = main(["jnf", "--input", str(inp), "--bits", "64", "--output", str(out)])
print("jnf exit code:", rc)
print(out.read_text())

# The verify subcommand recomputes the residual from scratch and replays the
# condition-ceiling checks; it is how a consumer audits a run file they were
# handed without trusting the producer.
rc = main(["verify", "--input", str(inp), str(out)])
print("verify exit code:", rc)

# Exit code 2 is reserved for honest rejections: x^2 - 1 is not PSD, and the
# output file carries the certificate rather than a factor.
bad_doc = {
    "kind": "matrix_poly",
    "n": 1,
    "degree": 2,
    "coeffs": [[[["-1", "0"]]], [[["0", "0"]]]],
}
badp = workdir / "notpsd.json"
cert = workdir / "certificate.json"
badp.write_text(json.dumps(bad_doc))

rc = main(["specfact", "--input", str(badp), "--bits", "64", "--output", str(cert)])
print("specfact exit code:", rc)
print(cert.read_text())

# Same seed, different thread counts: the output bytes never change.
run_a = workdir / "a.json"
run_b = workdir / "b.json"
main(["jnf", "--input", str(inp), "--threads", "1", "--output", str(run_a)])
main(["jnf", "--input", str(inp), "--threads", "4", "--output", str(run_b)])
print("thread-count independent:", run_a.read_bytes() == run_b.read_bytes())
