"""A tour of the command-line interface.

Every library capability is also reachable through the `subdioph`
command.  This script drives the same entry point in process and prints
each command line next to its output.  Replace `run` with the installed
`subdioph` executable (or `python3 -m subdioph.cli`) in a shell.
"""

import io
import json
import tempfile

from subdioph.cli import run_command


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), stdout=out, stderr=err)
    print("$ subdioph", " ".join(argv))
    for stream in (out, err):
        text = stream.getvalue()
        if text:
            print(text, end="")
    print("(exit %d)\n" % code)
    return out.getvalue()


def main():
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump({"n": 2, "e": 1, "basis": [["3"], ["4"]]}, fh)
        basis_path = fh.name

    run("height", "--basis", basis_path, "--no-header")
    run("pluecker", "--basis", basis_path, "--no-header")
    run("enumerate", "--n", "2", "--e", "1", "--hmax-squared", "10",
        "--format", "csv", "--no-header")
    run("construct", "--ell", "1", "--beta", "3", "--nmax", "2", "--no-header")
    run("records", "--ell", "1", "--beta", "3", "--hmax-squared", "20000",
        "--no-header")
    run("estimate", "--ell", "1", "--beta", "3", "--hmax-squared", "100000",
        "--no-header")
    run("exclusivity", "--ell", "1", "--beta", "3", "--nmax", "3",
        "--hmax-squared", "100000", "--no-header")
    run("harness", "--hmax-squared", "10000", "--no-header")
    run("verify", "heights", "--no-header")

    # usage errors exit 2 and keep the data stream empty
    run("construct", "--ell", "1", "--beta", "1", "--nmax", "1")


if __name__ == "__main__":
    main()
