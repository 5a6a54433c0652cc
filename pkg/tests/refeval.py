"""Independent reference evaluator and random program generator.

This is the oracle for the interpreter's concrete-execution behavior: a tiny
statement AST is evaluated here with 32-bit two's-complement semantics, and
separately rendered to C source for the interpreter under test. The two
final environments must agree, with or without garbage injected into
branches the reference run shows are never taken.
"""

MASK32 = (1 << 32) - 1

GARBAGE = [
    "@ $$$ ??? ;;;",
    "int int int ((",
    "+++ --- ;;",
    ")( ] [ ;",
    "if while return @",
    "0x 99zz __ ,,,",
    "'unclosed",
    "garbage( more garbage",
]

_ITER_CAP = 100_000


def to_s32(v):
    v &= MASK32
    return v - (1 << 32) if v >> 31 else v


def eval_expr(e, env):
    kind = e[0]
    if kind == "lit":
        return to_s32(e[1])
    if kind == "var":
        return env[e[1]]
    if kind == "un":
        v = eval_expr(e[2], env)
        if e[1] == "-":
            return to_s32(-v)
        if e[1] == "~":
            return to_s32(~v)
        if e[1] == "!":
            return 0 if v else 1
        raise AssertionError(e[1])
    op, a, b = e[1], eval_expr(e[2], env), eval_expr(e[3], env)
    if op == "+":
        return to_s32(a + b)
    if op == "-":
        return to_s32(a - b)
    if op == "*":
        return to_s32(a * b)
    if op in ("/", "%"):
        q = abs(a) // abs(b)
        if (a < 0) != (b < 0):
            q = -q
        return to_s32(q) if op == "/" else to_s32(a - q * b)
    if op == "&":
        return to_s32((a & MASK32) & (b & MASK32))
    if op == "|":
        return to_s32((a & MASK32) | (b & MASK32))
    if op == "^":
        return to_s32((a & MASK32) ^ (b & MASK32))
    if op == "<<":
        return to_s32(a << b)
    if op == ">>":
        return to_s32(a >> b)
    if op == "==":
        return int(a == b)
    if op == "!=":
        return int(a != b)
    if op == "<":
        return int(a < b)
    if op == "<=":
        return int(a <= b)
    if op == ">":
        return int(a > b)
    if op == ">=":
        return int(a >= b)
    if op == "&&":
        return int(bool(a) and bool(b))
    if op == "||":
        return int(bool(a) or bool(b))
    raise AssertionError(op)


def run_program(stmts, coverage=None):
    env = {}
    budget = [_ITER_CAP]
    for st in stmts:
        _exec(st, env, coverage, budget)
    return env


def _exec(st, env, coverage, budget):
    budget[0] -= 1
    assert budget[0] > 0, "reference run exceeded iteration cap"
    kind = st[0]
    if kind in ("decl", "assign"):
        env[st[1]] = eval_expr(st[2], env)
    elif kind == "if":
        _, sid, cond, then, els = st
        taken = bool(eval_expr(cond, env))
        if coverage is not None:
            coverage.setdefault(sid, set()).add("then" if taken else "else")
        for sub in (then if taken else els):
            _exec(sub, env, coverage, budget)
    elif kind == "while":
        _, sid, cond, body = st
        while eval_expr(cond, env):
            if coverage is not None:
                coverage.setdefault(sid, set()).add("body")
            for sub in body:
                _exec(sub, env, coverage, budget)
    else:
        raise AssertionError(kind)


# ------------------------------------------------------------------ render

def render_expr(e):
    kind = e[0]
    if kind == "lit":
        return f"({e[1]})" if e[1] < 0 else str(e[1])
    if kind == "var":
        return e[1]
    if kind == "un":
        return f"({e[1]}{render_expr(e[2])})"
    return f"({render_expr(e[2])} {e[1]} {render_expr(e[3])})"


def render_program(stmts, garbage_at=(), rng=None):
    """C source for the program; ``garbage_at`` is a set of (sid, branch)
    pairs naming branch bodies to pollute with invalid text."""
    lines = ["void testmain(void)", "{"]

    def pollute(sid, branch):
        if (sid, branch) in garbage_at:
            pick = rng.choice(GARBAGE) if rng is not None else GARBAGE[0]
            lines.append(pick)

    def emit(sub):
        kind = sub[0]
        if kind == "decl":
            lines.append(f"int {sub[1]} = {render_expr(sub[2])};")
        elif kind == "assign":
            lines.append(f"{sub[1]} = {render_expr(sub[2])};")
        elif kind == "if":
            _, sid, cond, then, els = sub
            lines.append(f"if ({render_expr(cond)}) {{")
            pollute(sid, "then")
            for x in then:
                emit(x)
            lines.append("} else {")
            pollute(sid, "else")
            for x in els:
                emit(x)
            lines.append("}")
        else:
            _, sid, cond, body = sub
            lines.append(f"while ({render_expr(cond)}) {{")
            pollute(sid, "body")
            for x in body:
                emit(x)
            lines.append("}")

    for st in stmts:
        emit(st)
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- generate

_BIN_OPS = ["+", "-", "*", "&", "|", "^", "==", "!=", "<", "<=", ">", ">=",
            "&&", "||"]


def gen_program(rng, max_stmts=30):
    """(statements, top-level variable names). All variables are declared
    before use, loops are counter-bounded, divisors and shift counts are
    safe literals, and names are globally unique (no shadowing)."""
    counter = [0]
    sid = [0]

    def new_name():
        counter[0] += 1
        return f"v{counter[0]}"

    def gen_expr(names, depth):
        if depth <= 0 or rng.random() < 0.3:
            if names and rng.random() < 0.6:
                return ("var", rng.choice(names))
            return ("lit", rng.randint(-100, 100))
        roll = rng.random()
        if roll < 0.12:
            return ("un", rng.choice(["-", "~", "!"]), gen_expr(names, depth - 1))
        if roll < 0.24:
            op = rng.choice(["/", "%", "<<", ">>"])
            a = gen_expr(names, depth - 1)
            if op in ("/", "%"):
                return ("bin", op, a,
                        ("lit", rng.choice([x for x in range(-7, 8) if x])))
            return ("bin", op, a, ("lit", rng.randint(0, 31)))
        return ("bin", rng.choice(_BIN_OPS),
                gen_expr(names, depth - 1), gen_expr(names, depth - 1))

    def gen_block(budget, depth, names, protected):
        out = []
        local = list(names)
        while budget[0] > 0 and rng.random() < 0.85:
            budget[0] -= 1
            roll = rng.random()
            writable = [x for x in local if x not in protected]
            if roll < 0.4 or not writable:
                name = new_name()
                out.append(("decl", name, gen_expr(local, 2)))
                local.append(name)
            elif roll < 0.7:
                out.append(("assign", rng.choice(writable), gen_expr(local, 2)))
            elif roll < 0.88 and depth > 0:
                sid[0] += 1
                out.append(("if", sid[0], gen_expr(local, 1),
                            gen_block(budget, depth - 1, local, protected),
                            gen_block(budget, depth - 1, local, protected)))
            elif depth > 0:
                sid[0] += 1
                name = new_name()
                out.append(("decl", name, ("lit", 0)))
                local.append(name)
                body = gen_block(budget, depth - 1, local, protected | {name})
                body.append(("assign", name,
                             ("bin", "+", ("var", name), ("lit", 1))))
                out.append(("while", sid[0],
                            ("bin", "<", ("var", name),
                             ("lit", rng.randint(0, 4))), body))
            else:
                out.append(("assign", rng.choice(writable), gen_expr(local, 1)))
        return out

    budget = [max_stmts]
    stmts = gen_block(budget, 2, [], set())
    top = [st[1] for st in stmts if st[0] == "decl"]
    return stmts, top


def untaken_sites(stmts, coverage):
    """(sid, branch) pairs whose bodies never executed in the covered run."""
    out = []

    def walk(sub):
        kind = sub[0]
        if kind == "if":
            _, sid, _c, then, els = sub
            seen = coverage.get(sid, set())
            if "then" not in seen:
                out.append((sid, "then"))
            if "else" not in seen:
                out.append((sid, "else"))
            for x in then:
                walk(x)
            for x in els:
                walk(x)
        elif kind == "while":
            _, sid, _c, body = sub
            if "body" not in coverage.get(sid, set()):
                out.append((sid, "body"))
            for x in body:
                walk(x)

    for st in stmts:
        walk(st)
    return out
