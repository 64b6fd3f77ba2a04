"""Writes corpus/golden/<name>.json from the reference computations in oracle.py."""
import glob, json, os, sys
import oracle

HOMOLOGY = {"unknot", "curl_pos", "hopf", "trefoil", "figure8"}

def poly(var, p):
    return {"var": var, "terms": [[e, c] for e, c in sorted(p.items())]}

def to_q(br, c):
    out = {}
    for e, co in br.items():
        e -= c
        assert e % 2 == 0
        m = e // 2
        oracle.padd(out, -m, co * (-1) ** (m % 2))
    return out

root = os.path.join(os.path.dirname(__file__), "..", "corpus")
for path in sorted(glob.glob(os.path.join(root, "pd", "*.pd.json"))):
    name = os.path.basename(path)[:-len(".pd.json")]
    d = json.load(open(path))
    pd = [tuple(x) for x in d["crossings"]]
    free = d["freeLoops"]
    br = oracle.bracket_A(pd, free)
    jq = oracle.jones(pd, free)
    if all(e % 4 == 0 for e in jq):
        jones = poly("t", {e // 4: c for e, c in jq.items()})
    else:
        jones = poly("tQuarter", jq)
    g = {
        "writhe": oracle.writhe(pd),
        "bracketA": poly("A", br),
        "bracketQ": poly("q", to_q(br, len(pd))),
        "jones": jones,
    }
    if name in HOMOLOGY:
        g["homology"] = oracle.khovanov(pd, free)
    with open(os.path.join(root, "golden", name + ".json"), "w") as f:
        json.dump(g, f)
        f.write("\n")
    print(name, file=sys.stderr)
