#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Convert a flat gate-level Verilog netlist (nand/nor/not/and/or/xor/xnor/buf
primitives, `fflopd`/`ff` flip-flops, `assign` aliases) into BENCH.

Constant-driven outputs are dropped; `assign a = b;` becomes a BUF; the clock
input is removed.
"""
import re
import sys

PRIMS = {"nand": "NAND", "nor": "NOR", "not": "NOT", "and": "AND", "or": "OR",
         "xor": "XOR", "xnor": "XNOR", "buf": "BUF"}
FLOPS = {"fflopd", "ff", "dff"}


def convert(text, name, source):
    body = text.split("endmodule", 1)[0]
    body = re.sub(r"//[^\n]*", "", body)
    stmts = [s.strip() for s in body.split(";")]
    inputs, outputs, gates, dffs, consts = [], [], [], [], set()
    clock = None
    for s in stmts:
        s = " ".join(s.split())
        if not s:
            continue
        head = s.split(" ", 1)[0]
        if head == "input":
            inputs += [x.strip() for x in s[6:].split(",")]
        elif head == "output":
            outputs += [x.strip() for x in s[7:].split(",")]
        elif head in ("wire", "module"):
            continue
        elif head == "assign":
            m = re.match(r"assign (\S+) = (\S+)$", s)
            lhs, rhs = m.group(1), m.group(2)
            if "'b" in rhs:
                consts.add(lhs)
            else:
                gates.append((lhs, "BUF", [rhs]))
        elif head in PRIMS:
            m = re.match(r"\w+ \S+ \((.*)\)$", s)
            pins = [p.strip() for p in m.group(1).split(",")]
            gates.append((pins[0], PRIMS[head], pins[1:]))
        elif head in FLOPS:
            pins = dict(re.findall(r"\.(\w+) \(([^)]*)\)", s))
            clock = pins["CK"].strip()
            dffs.append((pins["Q"].strip(), pins["D"].strip()))
        else:
            raise SystemExit(f"unsupported statement: {s}")
    inputs = [i for i in inputs if i != clock]
    outputs = [o for o in outputs if o not in consts]
    out = [f"# {name}", f"# converted from {source}",
           f"# {len(inputs)} inputs, {len(outputs)} outputs, {len(dffs)} D-type flipflops, {len(gates)} gates"]
    out += [f"INPUT({i})" for i in inputs]
    out += [f"OUTPUT({o})" for o in outputs]
    out += [f"{q} = DFF({d})" for q, d in dffs]
    out += [f"{o} = {k}({', '.join(ins)})" for o, k, ins in gates]
    return "\n".join(out) + "\n"


if __name__ == "__main__":
    src, name, label = sys.argv[1], sys.argv[2], sys.argv[3]
    sys.stdout.write(convert(open(src).read(), name, label))
