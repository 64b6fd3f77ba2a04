"""Planar diagram for the closure of a braid word (strands move upward).

Generator +k crosses strand positions k and k+1 with the strand from the
bottom-left passing over; -k puts it under. Arcs are labeled consecutively
along each component of the closure.
"""
import json, sys

def braid_pd(strands, word):
    # segment ids: each strand position between consecutive crossings
    seg = list(range(strands))          # current segment at each position
    nseg = strands
    bottom = list(seg)
    crossings = []  # (slot-order segments) before relabel, with in/out info
    succ = {}
    for g in word:
        k = abs(g) - 1
        bl, br = seg[k], seg[k + 1]
        tl, tr = nseg, nseg + 1
        nseg += 2
        succ[bl] = tr; succ[br] = tl
        if g > 0:
            # BL->TR over; under BR->TL. ccw from incoming under (BR): BR, TR, TL, BL
            crossings.append((br, tr, tl, bl))
        else:
            # BL->TR under. ccw from BL: BL, BR, TR, TL
            crossings.append((bl, br, tr, tl))
        seg[k], seg[k + 1] = tl, tr
    # closure: top segment at position p joins bottom segment at p
    alias = {}
    for p in range(strands):
        alias[seg[p]] = bottom[p]
    def canon(s):
        while s in alias and alias[s] != s:
            s = alias[s]
        return s
    succ2 = {canon(a): canon(b) for a, b in succ.items()}
    crossings = [tuple(canon(s) for s in c) for c in crossings]
    # trace components in order of smallest bottom position
    labels = {}
    nxt = 1
    for p in range(strands):
        s = bottom[p]
        if s in labels:
            continue
        cur = s
        while cur not in labels:
            labels[cur] = nxt; nxt += 1
            cur = succ2[cur]
    return [[labels[s] for s in c] for c in crossings]

if __name__ == "__main__":
    n = int(sys.argv[1]); word = [int(x) for x in sys.argv[2].split(",")]
    print(json.dumps({"crossings": braid_pd(n, word), "freeLoops": 0}))
