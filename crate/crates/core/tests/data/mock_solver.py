#!/usr/bin/env python3
# Tiny SMT-LIB2 responder for tests: decides queries by brute force over a
# small box. Pass unknown|hang|crash as argument to simulate misbehaviour.
import itertools
import sys

MODE = sys.argv[1] if len(sys.argv) > 1 else "ok"
BOX = range(-12, 13)


def tokens(text):
    text = text.replace("(", " ( ").replace(")", " ) ")
    return text.split()


def read(toks):
    t = toks.pop(0)
    if t == "(":
        out = []
        while toks[0] != ")":
            out.append(read(toks))
        toks.pop(0)
        return out
    return t


def ev(e, env):
    if isinstance(e, str):
        if e in env:
            return env[e]
        if e == "true":
            return True
        if e == "false":
            return False
        return int(e)
    op, args = e[0], e[1:]
    if op == "let":
        inner = dict(env)
        for name, val in args[0]:
            inner[name] = ev(val, env)
        return ev(args[1], inner)
    vals = [ev(a, env) for a in args]
    if op == "+":
        return sum(vals)
    if op == "-":
        return -vals[0] if len(vals) == 1 else vals[0] - sum(vals[1:])
    if op == "*":
        r = 1
        for v in vals:
            r *= v
        return r
    if op == "and":
        return all(vals)
    if op == "or":
        return any(vals)
    if op == "not":
        return not vals[0]
    if op == "=":
        return all(v == vals[0] for v in vals)
    if op == "<":
        return vals[0] < vals[1]
    if op == "<=":
        return vals[0] <= vals[1]
    if op == ">":
        return vals[0] > vals[1]
    if op == ">=":
        return vals[0] >= vals[1]
    raise ValueError(op)


def main():
    frames = [([], [])]
    model = None
    buf = ""
    for line in sys.stdin:
        buf += line
        toks = tokens(buf)
        if toks.count("(") != toks.count(")"):
            continue
        buf = ""
        while toks:
            cmd = read(toks)
            head = cmd[0]
            if head == "push":
                frames.append(([], []))
            elif head == "pop":
                frames.pop()
            elif head == "declare-fun":
                frames[-1][0].append((cmd[1], cmd[3]))
            elif head == "assert":
                frames[-1][1].append(cmd[1])
            elif head == "check-sat":
                if MODE == "crash":
                    sys.exit(3)
                if MODE == "hang":
                    sys.stdout.flush()
                    import time
                    time.sleep(60)
                if MODE == "unknown":
                    print("unknown", flush=True)
                    continue
                decls = [d for f in frames for d in f[0]]
                asserts = [a for f in frames for a in f[1]]
                domains = [BOX if s == "Int" else [False, True] for _, s in decls]
                model = None
                for vals in itertools.product(*domains):
                    env = {n: v for (n, _), v in zip(decls, vals)}
                    if all(ev(a, env) for a in asserts):
                        model = env
                        break
                print("sat" if model is not None else "unsat", flush=True)
            elif head == "get-model":
                parts = []
                for (n, s) in [d for f in frames for d in f[0]]:
                    v = model[n]
                    if isinstance(v, bool):
                        txt = "true" if v else "false"
                    elif v < 0:
                        txt = "(- %d)" % -v
                    else:
                        txt = str(v)
                    parts.append("  (define-fun %s () %s %s)" % (n, s, txt))
                print("(\n" + "\n".join(parts) + "\n)", flush=True)


main()
