"""Kernel-expansion prediction via matching statistics.

A fitted kernel machine scores a tree t as bias + sum_i alpha_i * K(T_i, t)
over support trees T_i.  Instead of evaluating each kernel separately, the
support trees are merged into one master forest whose suffix-array interval
tree is annotated once:

* ``wv``: for each lcp interval, the sum of alpha over the suffixes inside
  (each suffix carries the alpha of its originating support tree);
* ``val``: the telescoped contribution of everything that branches off
  strictly above the interval, so that a node of t whose suffix matches the
  master to length q with locus interval X contributes exactly
  ``val[X] + wv[X] * W[q]``;
* suffix links, so consecutive nodes of t reuse each other's matches: a
  node's suffix equals its child's suffix minus the first label, hence its
  match length is at least the child's minus one.  Processing nodes in
  reverse id order (children before parents) turns scoring into a single
  sweep whose work is governed by the matching-statistics bound rather than
  by sum of suffix lengths.

``predict_direct`` recomputes the same score as an explicit sum of pairwise
kernels and serves as the independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kernel import KernelParams, MergedTree, merge_forest, merged_esa, subpath_kernel, weight_table
from .level_ancestor import LevelAncestorIndex
from .trees import LabelTable, Tree, parse_tree, serialize_tree


@dataclass(frozen=True)
class SupportSet:
    """Support trees with their expansion coefficients and offset."""

    trees: list[Tree]
    alphas: list[float]
    bias: float
    params: KernelParams

    def __post_init__(self) -> None:
        if len(self.trees) != len(self.alphas):
            raise ValueError("need one coefficient per support tree")


@dataclass
class MasterIndex:
    """Annotated lcp-interval tree over the merged support forest.

    Interval id 0 is the root (empty string, full rank range).  Parallel
    arrays index intervals; ``leaf_of`` maps a suffix-array rank to the
    deepest interval containing it.  ``iv_children`` maps the branching
    label to the child interval; ``iv_slink`` is the interval of the same
    string minus its first label.
    """

    lam: float
    bias: float
    weights: list[float]
    merged: MergedTree
    sa: list[int]
    iv_depth: list[int]
    iv_lb: list[int]
    iv_rb: list[int]
    iv_parent: list[int]
    iv_children: list[dict[int, int]]
    iv_wv: list[float]
    iv_val: list[float]
    iv_slink: list[int]
    leaf_of: list[int]
    la: LevelAncestorIndex

    @property
    def n_intervals(self) -> int:
        return len(self.iv_depth)


@dataclass
class MatchStats:
    """Matching statistics of one tree against a master index.

    ``lengths[v]``: longest prefix of node v's root-ward suffix occurring
    root-ward in the master; ``locus[v]``: its locus interval.  Counters
    tally the elementary steps of the sweep: fresh label ``comparisons``,
    branching ``descents``, suffix-link jumps, and ``skips`` (interval
    steps that re-cross already-matched labels by length arithmetic after
    a suffix-link jump).  ``work`` is their sum.
    """

    lengths: list[int]
    locus: list[int]
    comparisons: int = 0
    descents: int = 0
    slinks: int = 0
    skips: int = 0

    @property
    def work(self) -> int:
        return self.comparisons + self.descents + self.slinks + self.skips


def _interval_tree(sa, lcp, suffix_len):
    """One sweep over the lcp array materializes every lcp interval.

    Open intervals live on a stack as [string depth, left bound, id].  Rank
    i first joins the top entry when its full suffix ties it, otherwise
    opens its own leaf entry; then the lcp boundary to rank i+1 closes all
    deeper entries, inserting the enclosing interval when absent.
    """
    n = len(sa)
    iv_depth: list[int] = [0]
    iv_lb: list[int] = [0]
    iv_rb: list[int] = [-1]
    iv_parent: list[int] = [-1]
    leaf_of: list[int] = [-1] * n
    stack: list[list[int]] = [[0, 0, 0]]

    def make(h: int, lb: int) -> int:
        iv_depth.append(h)
        iv_lb.append(lb)
        iv_rb.append(-1)
        iv_parent.append(-1)
        return len(iv_depth) - 1

    for i in range(n):
        h = suffix_len[sa[i]]
        if stack[-1][0] != h:
            stack.append([h, i, make(h, i)])
        leaf_of[i] = stack[-1][2]
        b = lcp[i]
        if b < 0:
            b = 0
        while stack[-1][0] > b:
            _, lb2, id2 = stack.pop()
            iv_rb[id2] = i + 1
            if stack[-1][0] < b:
                stack.append([b, lb2, make(b, lb2)])
            iv_parent[id2] = stack[-1][2]
    iv_rb[0] = n
    return iv_depth, iv_lb, iv_rb, iv_parent, leaf_of


def _interval_lca(iv_depth, iv_parent):
    """Binary-lifting LCA over the interval tree; returns (rows, level)."""
    m = len(iv_depth)
    order = sorted(range(m), key=iv_depth.__getitem__)
    level = [0] * m
    for c in order:
        p = iv_parent[c]
        if p != -1:
            level[c] = level[p] + 1
    rows = [[(p if p != -1 else c) for c, p in enumerate(iv_parent)]]
    maxl = max(level, default=0)
    while (1 << len(rows)) <= maxl:
        prev = rows[-1]
        rows.append([prev[x] for x in prev])
    return rows, level


def _lca(rows, level, a: int, b: int) -> int:
    if level[a] < level[b]:
        a, b = b, a
    diff = level[a] - level[b]
    j = 0
    while diff:
        if diff & 1:
            a = rows[j][a]
        diff >>= 1
        j += 1
    if a == b:
        return a
    for j in range(len(rows) - 1, -1, -1):
        if rows[j][a] != rows[j][b]:
            a = rows[j][a]
            b = rows[j][b]
    return rows[0][a]


def build_master_index(sv: SupportSet, *, builder: str = "linear") -> MasterIndex:
    merged = merge_forest(sv.trees)
    arr = merged_esa(merged, builder=builder)
    sa, lcp, rsa = arr.sa, arr.lcp, arr.rsa
    slen = arr.suffix_len
    n = len(sa)
    iv_depth, iv_lb, iv_rb, iv_parent, leaf_of = _interval_tree(sa, lcp, slen)
    m = len(iv_depth)
    labels = merged.labels
    parent = merged.parent
    la = LevelAncestorIndex(parent, merged.depth)

    # alpha mass per interval: prefix sums over ranks by source tree.
    pref = [0.0] * (n + 1)
    for i in range(n):
        pref[i + 1] = pref[i] + sv.alphas[merged.source[sa[i]] - 1]
    iv_wv = [pref[iv_rb[c]] - pref[iv_lb[c]] for c in range(m)]

    maxh = max(slen, default=1)
    weights = weight_table(maxh, sv.params.lam)

    # branching labels, then children maps and telescoped values top-down.
    non_root = [c for c in range(1, m)]
    if non_root:
        vs = [sa[iv_lb[c]] for c in non_root]
        js = [iv_depth[iv_parent[c]] for c in non_root]
        blab = la.query_batch(vs, js)
    iv_children: list[dict[int, int]] = [{} for _ in range(m)]
    for k, c in enumerate(non_root):
        iv_children[iv_parent[c]][labels[int(blab[k])]] = c

    iv_val = [0.0] * m
    for c in sorted(range(m), key=iv_depth.__getitem__):
        p = iv_parent[c]
        if p != -1:
            iv_val[c] = iv_val[p] + (iv_wv[p] - iv_wv[c]) * weights[iv_depth[p]]

    # suffix links: drop the first label by stepping both bounding suffixes
    # to their parents and taking the interval LCA of their leaf loci.
    rows, level = _interval_lca(iv_depth, iv_parent)
    iv_slink = [-1] * m
    iv_slink[0] = 0
    for c in range(1, m):
        if iv_depth[c] == 1:
            iv_slink[c] = 0
            continue
        p1 = parent[sa[iv_lb[c]]]
        p2 = parent[sa[iv_rb[c] - 1]]
        r1 = rsa[p1]
        r2 = rsa[p2]
        if r1 < 0 or r2 < 0:
            # string is [label, terminal]: the linked string is a bare
            # terminal whose rank was dropped.  Unreachable while matching
            # terminal-free input, so any target works; use the root.
            iv_slink[c] = 0
            continue
        t = _lca(rows, level, leaf_of[r1], leaf_of[r2])
        assert iv_depth[t] == iv_depth[c] - 1
        iv_slink[c] = t

    return MasterIndex(
        lam=sv.params.lam,
        bias=sv.bias,
        weights=weights,
        merged=merged,
        sa=sa,
        iv_depth=iv_depth,
        iv_lb=iv_lb,
        iv_rb=iv_rb,
        iv_parent=iv_parent,
        iv_children=iv_children,
        iv_wv=iv_wv,
        iv_val=iv_val,
        iv_slink=iv_slink,
        leaf_of=leaf_of,
        la=la,
    )


def matching_statistics(idx: MasterIndex, t: Tree, *, use_skips: bool = True) -> MatchStats:
    """Match length and locus for every node of t against the master.

    Nodes are processed children-first (descending preorder id).  A parent
    resumes from its best child's match instead of the root: the child
    matched l labels, so the parent — whose suffix is the child's minus the
    first label — matches at least l - 1.  The resume point is found by
    taking the suffix link of the deepest fully-matched interval on the
    child's path, then skip/counting down through already-matched labels
    (child lookups without re-comparing); only the tail beyond l - 1 needs
    fresh comparisons.  Skipping down from the linked ancestor, rather than
    climbing up from the link of the (possibly much deeper) locus itself,
    is what keeps the walk cost telescoping along best-child chains.
    """
    n = t.n
    lengths = [0] * n
    locus = [0] * n
    stats = MatchStats(lengths=lengths, locus=locus)
    iv_depth = idx.iv_depth
    iv_parent = idx.iv_parent
    iv_children = idx.iv_children
    iv_slink = idx.iv_slink
    iv_lb = idx.iv_lb
    sa = idx.sa
    mlab = idx.merged.labels
    la_m = idx.la
    la_t = LevelAncestorIndex(t.parent, t.depth)
    tlab = t.labels
    children_t = t.children
    depth_t = t.depth

    for v in range(n - 1, -1, -1):
        q = 0
        x = 0
        if use_skips and children_t[v]:
            best = max(children_t[v], key=lengths.__getitem__)
            q0 = lengths[best] - 1
            if q0 > 0:
                stats.slinks += 1
                x = iv_slink[iv_parent[locus[best]]]
                while iv_depth[x] < q0:
                    stats.skips += 1
                    x = iv_children[x][tlab[la_t.query(v, iv_depth[x])]]
                q = q0
        maxq = depth_t[v] + 1
        while q < maxq:
            c = tlab[la_t.query(v, q)]
            if q < iv_depth[x]:
                stats.comparisons += 1
                if mlab[la_m.query(sa[iv_lb[x]], q)] != c:
                    break
                q += 1
            else:
                stats.descents += 1
                nxt = iv_children[x].get(c)
                if nxt is None:
                    break
                x = nxt
                q += 1
        lengths[v] = q
        locus[v] = x
    return stats


def predict(idx: MasterIndex, t: Tree, *, use_skips: bool = True) -> float:
    """Score bias + sum_i alpha_i K(T_i, t) in one matching sweep."""
    stats = matching_statistics(idx, t, use_skips=use_skips)
    w = idx.weights
    val = idx.iv_val
    wv = idx.iv_wv
    total = idx.bias
    for v in range(t.n):
        x = stats.locus[v]
        total += val[x] + wv[x] * w[stats.lengths[v]]
    return total


def predict_direct(sv: SupportSet, t: Tree, *, builder: str = "linear") -> float:
    """Same score as an explicit sum of pairwise kernels (cross-check)."""
    total = sv.bias
    for tree, alpha in zip(sv.trees, sv.alphas):
        total += alpha * subpath_kernel(tree, t, sv.params, builder=builder)
    return total


def save_model(path: str, sv: SupportSet, table: LabelTable | None = None) -> None:
    """Text format: 'lambda x', 'bias b', then one 'alpha<TAB>tree' per SV."""
    lines = [f"lambda {sv.params.lam:.17g}", f"bias {sv.bias:.17g}"]
    for tree, alpha in zip(sv.trees, sv.alphas):
        lines.append(f"{alpha:.17g}\t{serialize_tree(tree, table)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path: str, table: LabelTable | None = None) -> SupportSet:
    with open(path, "r", encoding="utf-8") as fh:
        raw = [ln.strip() for ln in fh]
    lines = [ln for ln in raw if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("lambda "):
        raise ValueError("model file must start with a 'lambda <value>' line")
    lam = float(lines[0].split(None, 1)[1])
    bias = 0.0
    rest = lines[1:]
    if rest and rest[0].startswith("bias "):
        bias = float(rest[0].split(None, 1)[1])
        rest = rest[1:]
    trees: list[Tree] = []
    alphas: list[float] = []
    for k, ln in enumerate(rest):
        parts = ln.split("\t", 1)
        if len(parts) != 2:
            raise ValueError(f"model line {k + 1}: expected '<alpha>\\t<tree>'")
        alphas.append(float(parts[0]))
        trees.append(parse_tree(parts[1], table))
    return SupportSet(trees=trees, alphas=alphas, bias=bias, params=KernelParams(lam=lam))
