"""
Finite zero-sum stochastic games in discrete time.

    At state w the maximiser picks a in range(actions_max[w]), the
    minimiser picks b in range(actions_min[w]), and the next state is
    drawn from kernel[w][a, b, :]. The running cost g depends on the state
    only and lives in [0, 1]. A game with 1x1 action sets everywhere is a
    Markov chain; 0/1 kernels give the deterministic sup-inf case.

    Games are immutable once built and safe to share between workers.
"""
import json

import numpy as np

from .consts import exact_tol
from .errors import InputError, SchemaError, UnknownInstance
from .funcs import make_rng

__all__ = ["StochasticGame", "StepProcess", "validate", "serialize",
           "deserialize", "builtin", "builtin_names", "random_game"]

#Kernel rows must sum to one within this
row_tol = 1e-12


class StochasticGame:
    """
    Usage:
      G = StochasticGame(g, kernel)
      G = StochasticGame(g, kernel, actions_max=[...], actions_min=[...])

    Parameters:
      g       = running cost, one real per state
      kernel  = kernel[w] is an (actions_max[w], actions_min[w], states)
                array of transition probabilities

    Only shapes are checked here; probability and payoff ranges are
    reported by validate().
    """

    def __init__(self, g, kernel, actions_max=None, actions_min=None):
        g = np.array(g, dtype=float)
        if g.ndim != 1 or g.size < 1:
            raise SchemaError("$.g", "need one payoff per state")
        n = g.size
        if len(kernel) != n:
            raise SchemaError("$.kernel", "expected %d states, got %d"
                              % (n, len(kernel)))
        blocks = []
        for w, block in enumerate(kernel):
            arr = np.array(block, dtype=float)
            if arr.ndim != 3 or arr.shape[2] != n or 0 in arr.shape:
                raise SchemaError("$.kernel[%d]" % w,
                                  "expected an (a, b, %d) array" % n)
            blocks.append(arr)
        amax = [b.shape[0] for b in blocks]
        amin = [b.shape[1] for b in blocks]
        if actions_max is not None and list(actions_max) != amax:
            raise SchemaError("$.actions_max", "does not match kernel shape")
        if actions_min is not None and list(actions_min) != amin:
            raise SchemaError("$.actions_min", "does not match kernel shape")
        self.g = g
        self.kernel = tuple(blocks)
        self.actions_max = tuple(amax)
        self.actions_min = tuple(amin)
        for arr in (self.g,) + self.kernel:
            arr.flags.writeable = False
        #All (w, a, b) rows stacked, state w owning rows offsets[w]:offsets[w+1]
        sizes = np.array([a * b for a, b in zip(amax, amin)])
        self.offsets = np.concatenate(([0], np.cumsum(sizes)))
        self.stacked = np.concatenate([b.reshape(-1, n) for b in blocks])
        self.stacked.flags.writeable = False

    @property
    def state_count(self):
        return self.g.size

    def is_chain(self):
        return all(a == 1 for a in self.actions_max) and \
            all(b == 1 for b in self.actions_min)

    def structure(self):
        """
        'chain', 'max' (minimiser never chooses), 'min' (maximiser never
        chooses) or 'mixed'
        """
        if self.is_chain():
            return "chain"
        if all(b == 1 for b in self.actions_min):
            return "max"
        if all(a == 1 for a in self.actions_max):
            return "min"
        return "mixed"

    def transition_matrix(self):
        if not self.is_chain():
            raise InputError("transition matrix needs 1x1 action sets")
        return self.stacked

    def with_payoff(self, g):
        return StochasticGame(g, self.kernel)

    def __eq__(self, other):
        if not isinstance(other, StochasticGame):
            return NotImplemented
        return (np.array_equal(self.g, other.g)
                and len(self.kernel) == len(other.kernel)
                and all(np.array_equal(x, y)
                        for x, y in zip(self.kernel, other.kernel)))

    __hash__ = None

    def __repr__(self):
        return "StochasticGame(states=%d, actions_max=%s, actions_min=%s)" % (
            self.state_count, list(self.actions_max), list(self.actions_min))


class StepProcess:
    """
    Eventually periodic state sequence z(0), z(1), ...: the preperiod is
    played once, then the period repeats forever. The continuous time
    process is z(floor(t)).
    """

    def __init__(self, preperiod, period, state_count=None):
        self.preperiod = tuple(int(s) for s in preperiod)
        self.period = tuple(int(s) for s in period)
        if not self.period:
            raise InputError("period must hold at least one state")
        states = self.preperiod + self.period
        if min(states) < 0 or (state_count is not None and max(states) >= state_count):
            raise InputError("state index out of range in %r" % (states,))

    def states(self, N):
        """z(0), ..., z(N-1) as an int array"""
        N = int(N)
        P, L = len(self.preperiod), len(self.period)
        seq = np.array(self.preperiod + self.period, dtype=int)
        idx = np.arange(N)
        return seq[np.where(idx < P, idx, P + (idx - P) % L)]

    def __repr__(self):
        return "StepProcess(%r, %r)" % (self.preperiod, self.period)


def validate(game):
    """
    Kernel rows nonnegative with unit sum, payoffs in [0, 1]. Returns a
    list of human readable violations, empty when the game is well formed.
    """
    violations = []
    for w, gw in enumerate(game.g):
        if not (np.isfinite(gw) and 0.0 <= gw <= 1.0):
            violations.append("state %d: payoff out of [0,1] (g=%r)" % (w, float(gw)))
    for w, block in enumerate(game.kernel):
        for a in range(block.shape[0]):
            for b in range(block.shape[1]):
                row = block[a, b]
                if not np.all(np.isfinite(row)) or np.any(row < 0.0):
                    violations.append("state %d action (%d,%d): negative or "
                                      "non-finite probability" % (w, a, b))
                    continue
                total = float(np.sum(row))
                if abs(total - 1.0) > row_tol:
                    violations.append("state %d action (%d,%d): kernel row "
                                      "sums to %r, not 1" % (w, a, b, total))
    return violations


def serialize(game):
    """JSON document; floats are written with repr so loading is exact"""
    doc = {
        "states": game.state_count,
        "g": game.g.tolist(),
        "actions_max": list(game.actions_max),
        "actions_min": list(game.actions_min),
        "kernel": [block.tolist() for block in game.kernel],
    }
    return json.dumps(doc, indent=1) + "\n"


def _require(doc, key):
    if key not in doc:
        raise SchemaError("$.%s" % key, "missing key")
    return doc[key]


def _int_list(doc, key, n):
    vals = _require(doc, key)
    if not isinstance(vals, list) or len(vals) != n:
        raise SchemaError("$.%s" % key, "expected a list of %d integers" % n)
    for i, v in enumerate(vals):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise SchemaError("$.%s[%d]" % (key, i), "expected a positive integer")
    return vals


def _real(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, "expected a real number")
    return float(value)


def deserialize(text):
    """Inverse of serialize; raises SchemaError naming the offending key"""
    try:
        doc = json.loads(text)
    except ValueError as err:
        raise SchemaError("$", "not a JSON document (%s)" % err)
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    n = _require(doc, "states")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError("$.states", "expected a positive integer")
    g = _require(doc, "g")
    if not isinstance(g, list) or len(g) != n:
        raise SchemaError("$.g", "expected a list of %d reals" % n)
    g = [_real(v, "$.g[%d]" % i) for i, v in enumerate(g)]
    amax = _int_list(doc, "actions_max", n)
    amin = _int_list(doc, "actions_min", n)
    kernel = _require(doc, "kernel")
    if not isinstance(kernel, list) or len(kernel) != n:
        raise SchemaError("$.kernel", "expected one entry per state")
    blocks = []
    for w in range(n):
        path = "$.kernel[%d]" % w
        rows = kernel[w]
        if not isinstance(rows, list) or len(rows) != amax[w]:
            raise SchemaError(path, "expected %d maximiser actions" % amax[w])
        block = np.empty((amax[w], amin[w], n))
        for a in range(amax[w]):
            cols = rows[a]
            if not isinstance(cols, list) or len(cols) != amin[w]:
                raise SchemaError("%s[%d]" % (path, a),
                                  "expected %d minimiser actions" % amin[w])
            for b in range(amin[w]):
                probs = cols[b]
                where = "%s[%d][%d]" % (path, a, b)
                if not isinstance(probs, list) or len(probs) != n:
                    raise SchemaError(where, "expected %d probabilities" % n)
                for s, v in enumerate(probs):
                    v = _real(v, "%s[%d]" % (where, s))
                    if v < 0.0:
                        raise SchemaError("%s[%d]" % (where, s),
                                          "negative probability %r" % v)
                    block[a, b, s] = v
        blocks.append(block)
    return StochasticGame(g, blocks, amax, amin)


def _chain(g, P):
    P = np.asarray(P, dtype=float)
    return StochasticGame(g, [P[w].reshape(1, 1, -1) for w in range(P.shape[0])])


def _swap2():
    return _chain([1.0, 0.0], [[0.0, 1.0], [1.0, 0.0]])


def _lazy2():
    return _chain([1.0, 0.0], [[0.5, 0.5], [0.5, 0.5]])


def _ergodic3():
    #Rows are positive with probability one, hence irreducible
    return random_game(42, 3, 2, 1)


def _mdp_reach():
    #State 0 is A (payoff 1, absorbing); at B the maximiser stays or goes to A
    A = np.array([[[1.0, 0.0]]])
    B = np.array([[[0.0, 1.0]], [[1.0, 0.0]]])
    return StochasticGame([1.0, 0.0], [A, B])


def _matching_game():
    #Matching pennies through the dynamics: a match leads to the
    #payoff-1 state, a mismatch to the payoff-0 state, from either state
    win, lose = [1.0, 0.0], [0.0, 1.0]
    block = np.array([[win, lose], [lose, win]])
    return StochasticGame([1.0, 0.0], [block, block.copy()])


_builtins = {
    "swap2": _swap2,
    "lazy2": _lazy2,
    "ergodic3": _ergodic3,
    "mdp_reach": _mdp_reach,
    "matching_game": _matching_game,
}


def builtin_names():
    return tuple(_builtins)


def builtin(name):
    """
    Named instances whose limit values are known in closed form:
    swap2, lazy2, ergodic3, mdp_reach, matching_game
    """
    try:
        return _builtins[name]()
    except KeyError:
        raise UnknownInstance("no builtin game named %r (choose from %s)"
                              % (name, ", ".join(_builtins)))


def random_game(seed, states, amax, amin):
    """
    Payoffs uniform on [0, 1); kernel rows uniform on [0, 1) then
    normalised. Same seed, same game (see funcs.make_rng).
    """
    states, amax, amin = int(states), int(amax), int(amin)
    if min(states, amax, amin) < 1:
        raise InputError("states and action counts must be >= 1")
    rng = make_rng(seed)
    g = rng.random(states)
    blocks = []
    for _ in range(states):
        raw = rng.random((amax, amin, states)) + exact_tol
        blocks.append(raw / raw.sum(axis=2, keepdims=True))
    return StochasticGame(g, blocks)
