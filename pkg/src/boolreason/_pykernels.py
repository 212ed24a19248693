"""Pure-Python circuit kernels.

Every function is a single bottom-up pass over the flat arrays described in
`circuit`, visiting each input node exactly once.  `_ckernels.pyx` is a
compiled twin with identical signatures and identical outputs; `kernels`
picks one of the two at import time.

Shared conventions:

    values  array('i'), 1-based per feature: 1 when the instance sets the
            feature true, else 0 (slot 0 unused)
    action  array('i'), 1-based per feature: 0 keep, 1 fix true, 2 fix
            false, 3 replace both polarities with constant 1

Pass results carry the count of input nodes visited so callers can assert
the linear-time contract.  Satisfiability/validity return -v instead of a
bit when feature v occurs in both polarities (the circuit is not monotone).

Output circuits from substitute() may keep nodes that became unreachable
when a parent folded to a constant; a single pass cannot know reachability
in advance, and the extra nodes never affect the root's value.
"""

from array import array

from ._encoding import AND, DEC, FALSE, LIT, OR, TRUE

# image sentinels used while rebuilding circuits
_F = -1
_T = -2


def nnf_eval(kind, payload, child_off, children, root, values):
    """Value of the circuit on a total assignment (handles DEC gates too)."""
    n = root + 1
    val = bytearray(n)
    for i in range(n):
        k = kind[i]
        if k == LIT:
            code = payload[i]
            v = values[code] if code > 0 else 1 - values[-code]
        elif k == AND:
            v = 1
            for j in range(child_off[i], child_off[i + 1]):
                if not val[children[j]]:
                    v = 0
                    break
        elif k == OR:
            v = 0
            for j in range(child_off[i], child_off[i + 1]):
                if val[children[j]]:
                    v = 1
                    break
        elif k == DEC:
            j = child_off[i]
            v = val[children[j]] if values[payload[i]] else val[children[j + 1]]
        elif k == TRUE:
            v = 1
        else:
            v = 0
        val[i] = v
    return val[root]


def monotone_sat(kind, payload, child_off, children, root, nvars):
    """(bit, visited) for satisfiability of a monotone NNF circuit."""
    n = root + 1
    sat = bytearray(n)
    seen = array("i", bytes(4 * (nvars + 1)))
    for i in range(n):
        k = kind[i]
        if k == LIT:
            code = payload[i]
            v = code if code > 0 else -code
            pol = 1 if code > 0 else 2
            if seen[v] not in (0, pol):
                return (-v, i + 1)
            seen[v] = pol
            s = 1
        elif k == AND:
            s = 1
            for j in range(child_off[i], child_off[i + 1]):
                if not sat[children[j]]:
                    s = 0
                    break
        elif k == OR:
            s = 0
            for j in range(child_off[i], child_off[i + 1]):
                if sat[children[j]]:
                    s = 1
                    break
        elif k == TRUE:
            s = 1
        elif k == FALSE:
            s = 0
        else:
            raise ValueError("decision gate in a monotone circuit")
        sat[i] = s
    return (sat[root], n)


def monotone_valid(kind, payload, child_off, children, root, nvars):
    """(bit, visited) for validity of a monotone NNF circuit."""
    n = root + 1
    val = bytearray(n)
    seen = array("i", bytes(4 * (nvars + 1)))
    for i in range(n):
        k = kind[i]
        if k == LIT:
            code = payload[i]
            v = code if code > 0 else -code
            pol = 1 if code > 0 else 2
            if seen[v] not in (0, pol):
                return (-v, i + 1)
            seen[v] = pol
            s = 0  # a literal is falsifiable
        elif k == AND:
            s = 1
            for j in range(child_off[i], child_off[i + 1]):
                if not val[children[j]]:
                    s = 0
                    break
        elif k == OR:
            s = 0
            for j in range(child_off[i], child_off[i + 1]):
                if val[children[j]]:
                    s = 1
                    break
        elif k == TRUE:
            s = 1
        elif k == FALSE:
            s = 0
        else:
            raise ValueError("decision gate in a monotone circuit")
        val[i] = s
    return (val[root], n)


def substitute(kind, payload, child_off, children, root, action, nvars):
    """Apply per-feature actions to an NNF circuit, propagating constants.

    Returns (kind, payload, child_off, children, root, visited) for the
    rebuilt circuit.  Gates never keep constant children; the root is the
    only node that may be a constant.
    """
    n = root + 1
    image = [0] * n
    okind: list[int] = []
    opayload: list[int] = []
    ooff: list[int] = [0]
    och: list[int] = []

    def emit(k, p, childs):
        okind.append(k)
        opayload.append(p)
        och.extend(childs)
        ooff.append(len(och))
        return len(okind) - 1

    for i in range(n):
        k = kind[i]
        if k == LIT:
            code = payload[i]
            act = action[code if code > 0 else -code]
            if act == 0:
                img = emit(LIT, code, ())
            elif act == 3:
                img = _T
            elif act == 1:
                img = _T if code > 0 else _F
            else:
                img = _F if code > 0 else _T
        elif k == AND:
            parts: list[int] = []
            img = 0
            dead = False
            for j in range(child_off[i], child_off[i + 1]):
                c = image[children[j]]
                if c == _F:
                    dead = True
                    break
                if c != _T:
                    parts.append(c)
            if dead:
                img = _F
            else:
                parts = list(dict.fromkeys(parts))
                if not parts:
                    img = _T
                elif len(parts) == 1:
                    img = parts[0]
                else:
                    img = emit(AND, 0, parts)
        elif k == OR:
            parts = []
            img = 0
            alive = False
            for j in range(child_off[i], child_off[i + 1]):
                c = image[children[j]]
                if c == _T:
                    alive = True
                    break
                if c != _F:
                    parts.append(c)
            if alive:
                img = _T
            else:
                parts = list(dict.fromkeys(parts))
                if not parts:
                    img = _F
                elif len(parts) == 1:
                    img = parts[0]
                else:
                    img = emit(OR, 0, parts)
        elif k == TRUE:
            img = _T
        elif k == FALSE:
            img = _F
        else:
            raise ValueError("decision gate in a monotone circuit")
        image[i] = img

    oroot = image[root]
    if oroot == _F:
        oroot = emit(FALSE, 0, ())
    elif oroot == _T:
        oroot = emit(TRUE, 0, ())
    return (
        array("i", okind),
        array("i", opayload),
        array("i", ooff),
        array("i", och),
        oroot,
        n,
    )


def reason_build(kind, payload, child_off, children, root, values, nvars):
    """Fused consensus + filter + simplify pass over a Decision-DNNF circuit.

    For each decision gate on X with branches (hi, lo) the image is
    or(and(l, b), and(hi', lo')) where l is the literal of X the instance
    satisfies, b the matching branch image and (hi', lo') the consensus
    conjunction; literals the instance falsifies become constant 0 and all
    constants are propagated on the fly.
    """
    n = root + 1
    image = [0] * n
    lit_ids = array("i", bytes(4 * (nvars + 1)))  # per feature, id + 1
    okind: list[int] = []
    opayload: list[int] = []
    ooff: list[int] = [0]
    och: list[int] = []

    def emit(k, p, childs):
        okind.append(k)
        opayload.append(p)
        och.extend(childs)
        ooff.append(len(och))
        return len(okind) - 1

    def lit_node(v, positive):
        cached = lit_ids[v]
        if cached:
            return cached - 1
        node = emit(LIT, v if positive else -v, ())
        lit_ids[v] = node + 1
        return node

    for i in range(n):
        k = kind[i]
        if k == LIT:
            code = payload[i]
            v = code if code > 0 else -code
            if (code > 0) == (values[v] == 1):
                img = lit_node(v, code > 0)
            else:
                img = _F
        elif k == AND:
            parts: list[int] = []
            dead = False
            for j in range(child_off[i], child_off[i + 1]):
                c = image[children[j]]
                if c == _F:
                    dead = True
                    break
                if c != _T:
                    parts.append(c)
            if dead:
                img = _F
            else:
                parts = list(dict.fromkeys(parts))
                if not parts:
                    img = _T
                elif len(parts) == 1:
                    img = parts[0]
                else:
                    img = emit(AND, 0, parts)
        elif k == DEC:
            v = payload[i]
            j = child_off[i]
            hi = image[children[j]]
            lo = image[children[j + 1]]
            # consensus conjunction of the two branch images
            if hi == _F or lo == _F:
                cons = _F
            elif hi == _T:
                cons = lo
            elif lo == _T:
                cons = hi
            elif hi == lo:
                cons = hi
            else:
                cons = emit(AND, 0, (hi, lo))
            # branch selected by the instance, guarded by its literal
            keep = hi if values[v] else lo
            if keep == _F:
                guarded = _F
            else:
                ln = lit_node(v, values[v] == 1)
                guarded = ln if keep == _T else emit(AND, 0, (ln, keep))
            if cons == _T:
                img = _T
            elif cons == _F:
                img = guarded
            elif guarded == _F:
                img = cons
            elif guarded == cons:
                img = cons
            else:
                img = emit(OR, 0, (guarded, cons))
        elif k == TRUE:
            img = _T
        elif k == FALSE:
            img = _F
        else:
            raise ValueError("unexpected gate kind in a decision circuit")
        image[i] = img

    oroot = image[root]
    if oroot == _F:
        oroot = emit(FALSE, 0, ())
    elif oroot == _T:
        oroot = emit(TRUE, 0, ())
    return (
        array("i", okind),
        array("i", opayload),
        array("i", ooff),
        array("i", och),
        oroot,
        n,
    )
