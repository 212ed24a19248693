# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled circuit kernels; the contract lives in _pykernels.

Kind codes are hardcoded and must match _encoding.  Gate-child dedup uses
a stamp array indexed by output node id instead of the pure version's
dict, same first-occurrence order.
"""

from cpython cimport array
from cpython.object cimport Py_SIZE

import array as _pyarray


cdef array.array _INT_TEMPLATE = _pyarray.array("i", [])

cdef enum:
    K_FALSE = 0
    K_TRUE = 1
    K_LIT = 2
    K_AND = 3
    K_OR = 4
    K_DEC = 5
    S_F = -1  # image sentinel: constant 0
    S_T = -2  # image sentinel: constant 1


cdef inline int _push(array.array a, int value) except -1:
    cdef Py_ssize_t n = Py_SIZE(a)
    array.resize_smart(a, n + 1)
    a.data.as_ints[n] = value
    return 0


cdef int _emit(array.array okind, array.array opayload, array.array ooff,
               array.array och, int k, int p, int* childs,
               Py_ssize_t nchilds) except -1:
    cdef Py_ssize_t j
    _push(okind, k)
    _push(opayload, p)
    for j in range(nchilds):
        _push(och, childs[j])
    _push(ooff, <int>Py_SIZE(och))
    return <int>Py_SIZE(okind) - 1


def nnf_eval(int[::1] kind, int[::1] payload, int[::1] child_off,
             int[::1] children, int root, int[::1] values):
    cdef Py_ssize_t n = root + 1
    cdef unsigned char[::1] val = bytearray(n)
    cdef Py_ssize_t i, j
    cdef int k, code, v
    for i in range(n):
        k = kind[i]
        if k == K_LIT:
            code = payload[i]
            v = values[code] if code > 0 else 1 - values[-code]
        elif k == K_AND:
            v = 1
            for j in range(child_off[i], child_off[i + 1]):
                if not val[children[j]]:
                    v = 0
                    break
        elif k == K_OR:
            v = 0
            for j in range(child_off[i], child_off[i + 1]):
                if val[children[j]]:
                    v = 1
                    break
        elif k == K_DEC:
            j = child_off[i]
            v = val[children[j]] if values[payload[i]] else val[children[j + 1]]
        elif k == K_TRUE:
            v = 1
        else:
            v = 0
        val[i] = <unsigned char>v
    return val[root]


def monotone_sat(int[::1] kind, int[::1] payload, int[::1] child_off,
                 int[::1] children, int root, int nvars):
    cdef Py_ssize_t n = root + 1
    cdef unsigned char[::1] sat = bytearray(n)
    cdef array.array seen_arr = array.clone(_INT_TEMPLATE, nvars + 1, zero=True)
    cdef int* seen = seen_arr.data.as_ints
    cdef Py_ssize_t i, j
    cdef int k, code, v, pol, s
    for i in range(n):
        k = kind[i]
        if k == K_LIT:
            code = payload[i]
            v = code if code > 0 else -code
            pol = 1 if code > 0 else 2
            if seen[v] != 0 and seen[v] != pol:
                return (-v, i + 1)
            seen[v] = pol
            s = 1
        elif k == K_AND:
            s = 1
            for j in range(child_off[i], child_off[i + 1]):
                if not sat[children[j]]:
                    s = 0
                    break
        elif k == K_OR:
            s = 0
            for j in range(child_off[i], child_off[i + 1]):
                if sat[children[j]]:
                    s = 1
                    break
        elif k == K_TRUE:
            s = 1
        elif k == K_FALSE:
            s = 0
        else:
            raise ValueError("decision gate in a monotone circuit")
        sat[i] = <unsigned char>s
    return (sat[root], n)


def monotone_valid(int[::1] kind, int[::1] payload, int[::1] child_off,
                   int[::1] children, int root, int nvars):
    cdef Py_ssize_t n = root + 1
    cdef unsigned char[::1] val = bytearray(n)
    cdef array.array seen_arr = array.clone(_INT_TEMPLATE, nvars + 1, zero=True)
    cdef int* seen = seen_arr.data.as_ints
    cdef Py_ssize_t i, j
    cdef int k, code, v, pol, s
    for i in range(n):
        k = kind[i]
        if k == K_LIT:
            code = payload[i]
            v = code if code > 0 else -code
            pol = 1 if code > 0 else 2
            if seen[v] != 0 and seen[v] != pol:
                return (-v, i + 1)
            seen[v] = pol
            s = 0  # a literal is falsifiable
        elif k == K_AND:
            s = 1
            for j in range(child_off[i], child_off[i + 1]):
                if not val[children[j]]:
                    s = 0
                    break
        elif k == K_OR:
            s = 0
            for j in range(child_off[i], child_off[i + 1]):
                if val[children[j]]:
                    s = 1
                    break
        elif k == K_TRUE:
            s = 1
        elif k == K_FALSE:
            s = 0
        else:
            raise ValueError("decision gate in a monotone circuit")
        val[i] = <unsigned char>s
    return (val[root], n)


def substitute(int[::1] kind, int[::1] payload, int[::1] child_off,
               int[::1] children, int root, int[::1] action, int nvars):
    cdef Py_ssize_t n = root + 1
    cdef array.array image_arr = array.clone(_INT_TEMPLATE, n, zero=False)
    cdef int* image = image_arr.data.as_ints
    # stamp[c] == i + 1 marks output id c as collected for input gate i
    cdef array.array stamp_arr = array.clone(_INT_TEMPLATE, n + 1, zero=True)
    cdef int* stamp = stamp_arr.data.as_ints

    cdef Py_ssize_t max_arity = 0, width
    cdef Py_ssize_t i, j
    for i in range(n):
        width = child_off[i + 1] - child_off[i]
        if width > max_arity:
            max_arity = width
    cdef array.array parts_arr = array.clone(
        _INT_TEMPLATE, max_arity if max_arity > 0 else 1, zero=False
    )
    cdef int* parts = parts_arr.data.as_ints

    cdef array.array okind = array.clone(_INT_TEMPLATE, 0, zero=False)
    cdef array.array opayload = array.clone(_INT_TEMPLATE, 0, zero=False)
    cdef array.array ooff = array.clone(_INT_TEMPLATE, 0, zero=False)
    cdef array.array och = array.clone(_INT_TEMPLATE, 0, zero=False)
    _push(ooff, 0)

    cdef int k, code, act, img, c, mark, dead, alive
    cdef Py_ssize_t np
    for i in range(n):
        k = kind[i]
        mark = <int>i + 1
        if k == K_LIT:
            code = payload[i]
            act = action[code if code > 0 else -code]
            if act == 0:
                img = _emit(okind, opayload, ooff, och, K_LIT, code, NULL, 0)
            elif act == 3:
                img = S_T
            elif act == 1:
                img = S_T if code > 0 else S_F
            else:
                img = S_F if code > 0 else S_T
        elif k == K_AND:
            np = 0
            dead = 0
            for j in range(child_off[i], child_off[i + 1]):
                c = image[children[j]]
                if c == S_F:
                    dead = 1
                    break
                if c != S_T and stamp[c] != mark:
                    stamp[c] = mark
                    parts[np] = c
                    np += 1
            if dead:
                img = S_F
            elif np == 0:
                img = S_T
            elif np == 1:
                img = parts[0]
            else:
                img = _emit(okind, opayload, ooff, och, K_AND, 0, parts, np)
        elif k == K_OR:
            np = 0
            alive = 0
            for j in range(child_off[i], child_off[i + 1]):
                c = image[children[j]]
                if c == S_T:
                    alive = 1
                    break
                if c != S_F and stamp[c] != mark:
                    stamp[c] = mark
                    parts[np] = c
                    np += 1
            if alive:
                img = S_T
            elif np == 0:
                img = S_F
            elif np == 1:
                img = parts[0]
            else:
                img = _emit(okind, opayload, ooff, och, K_OR, 0, parts, np)
        elif k == K_TRUE:
            img = S_T
        elif k == K_FALSE:
            img = S_F
        else:
            raise ValueError("decision gate in a monotone circuit")
        image[i] = img

    cdef int oroot = image[root]
    if oroot == S_F:
        oroot = _emit(okind, opayload, ooff, och, K_FALSE, 0, NULL, 0)
    elif oroot == S_T:
        oroot = _emit(okind, opayload, ooff, och, K_TRUE, 0, NULL, 0)
    return (okind, opayload, ooff, och, oroot, n)


def reason_build(int[::1] kind, int[::1] payload, int[::1] child_off,
                 int[::1] children, int root, int[::1] values, int nvars):
    cdef Py_ssize_t n = root + 1
    cdef array.array image_arr = array.clone(_INT_TEMPLATE, n, zero=False)
    cdef int* image = image_arr.data.as_ints
    cdef array.array lit_arr = array.clone(_INT_TEMPLATE, nvars + 1, zero=True)
    cdef int* lit_ids = lit_arr.data.as_ints  # per feature, output id + 1
    # outputs per input node: <= 1 for and/literal, <= 3 for a decision
    # gate, plus one literal per feature and a possible constant root
    cdef array.array stamp_arr = array.clone(
        _INT_TEMPLATE, 3 * n + nvars + 3, zero=True
    )
    cdef int* stamp = stamp_arr.data.as_ints

    cdef Py_ssize_t max_arity = 0, width
    cdef Py_ssize_t i, j
    for i in range(n):
        width = child_off[i + 1] - child_off[i]
        if width > max_arity:
            max_arity = width
    cdef array.array parts_arr = array.clone(
        _INT_TEMPLATE, max_arity if max_arity > 0 else 1, zero=False
    )
    cdef int* parts = parts_arr.data.as_ints

    cdef array.array okind = array.clone(_INT_TEMPLATE, 0, zero=False)
    cdef array.array opayload = array.clone(_INT_TEMPLATE, 0, zero=False)
    cdef array.array ooff = array.clone(_INT_TEMPLATE, 0, zero=False)
    cdef array.array och = array.clone(_INT_TEMPLATE, 0, zero=False)
    _push(ooff, 0)

    cdef int k, code, v, img, c, mark, dead
    cdef int hi, lo, cons, keep, guarded, ln
    cdef int two[2]
    cdef Py_ssize_t np
    for i in range(n):
        k = kind[i]
        mark = <int>i + 1
        if k == K_LIT:
            code = payload[i]
            v = code if code > 0 else -code
            if (code > 0) == (values[v] == 1):
                if lit_ids[v]:
                    img = lit_ids[v] - 1
                else:
                    img = _emit(okind, opayload, ooff, och, K_LIT, code, NULL, 0)
                    lit_ids[v] = img + 1
            else:
                img = S_F
        elif k == K_AND:
            np = 0
            dead = 0
            for j in range(child_off[i], child_off[i + 1]):
                c = image[children[j]]
                if c == S_F:
                    dead = 1
                    break
                if c != S_T and stamp[c] != mark:
                    stamp[c] = mark
                    parts[np] = c
                    np += 1
            if dead:
                img = S_F
            elif np == 0:
                img = S_T
            elif np == 1:
                img = parts[0]
            else:
                img = _emit(okind, opayload, ooff, och, K_AND, 0, parts, np)
        elif k == K_DEC:
            v = payload[i]
            j = child_off[i]
            hi = image[children[j]]
            lo = image[children[j + 1]]
            # consensus conjunction of the two branch images
            if hi == S_F or lo == S_F:
                cons = S_F
            elif hi == S_T:
                cons = lo
            elif lo == S_T:
                cons = hi
            elif hi == lo:
                cons = hi
            else:
                two[0] = hi
                two[1] = lo
                cons = _emit(okind, opayload, ooff, och, K_AND, 0, two, 2)
            # branch selected by the instance, guarded by its literal
            keep = hi if values[v] else lo
            if keep == S_F:
                guarded = S_F
            else:
                if lit_ids[v]:
                    ln = lit_ids[v] - 1
                else:
                    ln = _emit(okind, opayload, ooff, och, K_LIT,
                               v if values[v] == 1 else -v, NULL, 0)
                    lit_ids[v] = ln + 1
                if keep == S_T:
                    guarded = ln
                else:
                    two[0] = ln
                    two[1] = keep
                    guarded = _emit(okind, opayload, ooff, och, K_AND, 0, two, 2)
            if cons == S_T:
                img = S_T
            elif cons == S_F:
                img = guarded
            elif guarded == S_F:
                img = cons
            elif guarded == cons:
                img = cons
            else:
                two[0] = guarded
                two[1] = cons
                img = _emit(okind, opayload, ooff, och, K_OR, 0, two, 2)
        elif k == K_TRUE:
            img = S_T
        elif k == K_FALSE:
            img = S_F
        else:
            raise ValueError("unexpected gate kind in a decision circuit")
        image[i] = img

    cdef int oroot = image[root]
    if oroot == S_F:
        oroot = _emit(okind, opayload, ooff, och, K_FALSE, 0, NULL, 0)
    elif oroot == S_T:
        oroot = _emit(okind, opayload, ooff, och, K_TRUE, 0, NULL, 0)
    return (okind, opayload, ooff, och, oroot, n)
