"""The latdens command line, driven in-process.

Each invocation below is exactly what `latdens ...` does in a shell;
main() returns the exit code.  Reports are plain text by default and
sorted-key JSON under --json, so identical inputs give identical bytes.
"""

import json

from latdens.cli import main

I2 = json.dumps({"gram": [[1, 0], [0, 1]]})

print("$ latdens density --input i2.json")
main(["density", "--input", I2])

print("\n$ latdens analyze --input i2.json --json")
main(["analyze", "--input", I2, "--json"])

print("\n$ latdens mass --sum-squares 3")
main(["mass", "--sum-squares", "3"])

print("\n$ latdens oracle --input i2.json --max-level 5")
main(["oracle", "--input", I2, "--max-level", "5"])

print("\n$ latdens normal-form --input '...diag(1,1,2)...'")
main(["normal-form", "--input",
      json.dumps({"gram": [[1, 0, 0], [0, 1, 0], [0, 0, 2]]})])

print("\nexit codes: 0 ok, 2 invalid input, 3 insufficient precision,"
      " 4 oracle budget")
code = main(["analyze", "--input", json.dumps({"gram": []})])
print("empty gram ->", code)
