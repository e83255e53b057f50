#!/usr/bin/env python3
"""Plain-integer Poseidon used to derive the frozen test vectors.

usage: poseidon_reference.py perm3 a b        circomlib-style hash of two inputs
       poseidon_reference.py hash v1 v2 ...   width-6 sponge used by the membership circuit
"""
import sys

from poseidon_params import P, PARAMS, generate


def permute(state, rf, rp, constants, mds):
    t = len(state)
    state = list(state)
    for r in range(rf + rp):
        state = [(s + constants[r * t + i]) % P for i, s in enumerate(state)]
        if r < rf // 2 or r >= rf // 2 + rp:
            state = [pow(s, 5, P) for s in state]
        else:
            state[0] = pow(state[0], 5, P)
        state = [sum(mds[i][j] * state[j] for j in range(t)) % P for i in range(t)]
    return state


def params(width):
    for t, rf, rp in PARAMS:
        if t == width:
            c, m = generate(t, rf, rp)
            return rf, rp, c, m
    raise ValueError(width)


def circom_hash(inputs):
    rf, rp, c, m = params(len(inputs) + 1)
    return permute([0] + list(inputs), rf, rp, c, m)[0]


def sponge(inputs, width=6):
    rf, rp, c, m = params(width)
    rate = width - 1
    state = [0] * width
    state[0] = len(inputs)
    padded = list(inputs) + [0] * ((-len(inputs)) % rate)
    if not padded:
        padded = [0] * rate
    for k in range(0, len(padded), rate):
        for i in range(rate):
            state[1 + i] = (state[1 + i] + padded[k + i]) % P
        state = permute(state, rf, rp, c, m)
    return state[0]


if __name__ == "__main__":
    mode, args = sys.argv[1], [int(a, 0) for a in sys.argv[2:]]
    if mode == "perm3":
        print(hex(circom_hash(args)))
    else:
        print(hex(sponge(args)))
