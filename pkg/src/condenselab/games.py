"""Querier-versus-responder games: adversaries, query strategies and their analysis.

Query positions are 1-based.  A query is a tuple of positions; a singleton
is an ordinary bit query and a longer tuple asks for the conjunction.
"""

from __future__ import annotations

import itertools
import logging
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from condenselab.config import DEFAULT, Config
from condenselab.constructions import (
    CertificateClaim,
    CheatSheetSpec,
    Tribes,
    cheat_sheet,
    cheat_sheet_spec,
    tribes,
)
from condenselab.errors import InputShapeError, ProtocolError, UsageError
from condenselab.fnrep import Restriction, StructuredFunction, materialize, restrict_table
from condenselab.measures import DepthSolver, certificate_at, zero_charge

logger = logging.getLogger(__name__)

Query = Tuple[int, ...]


@dataclass(frozen=True)
class Output:
    value: int


Move = Union[Query, Output]


@dataclass(frozen=True)
class QueryRecord:
    variables: Query
    answer: int

    def to_dict(self) -> Dict[str, Any]:
        return {"set": list(self.variables), "answer": self.answer}


@dataclass
class GameTranscript:
    queries: List[QueryRecord] = field(default_factory=list)
    zero_count: int = 0
    one_count: int = 0
    output: Optional[int] = None
    complete: bool = True

    def record(self, variables: Query, answer: int) -> None:
        self.queries.append(QueryRecord(tuple(variables), int(answer)))
        if answer:
            self.one_count += 1
        else:
            self.zero_count += 1

    def counts_consistent(self) -> bool:
        ones = sum(1 for record in self.queries if record.answer)
        return self.one_count == ones and self.zero_count == len(self.queries) - ones

    def single_answers(self) -> Dict[int, int]:
        return {record.variables[0]: record.answer for record in self.queries if len(record.variables) == 1}

    def queried_positions(self) -> set:
        return {var for record in self.queries for var in record.variables}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "queries": [record.to_dict() for record in self.queries],
            "zero_count": self.zero_count,
            "one_count": self.one_count,
            "output": self.output,
            "complete": self.complete,
        }


class Querier(ABC):
    """Deterministic player: the next move is a function of the transcript."""

    arity: int

    @abstractmethod
    def next_move(self, transcript: GameTranscript) -> Move:
        raise NotImplementedError


class Responder(ABC):
    arity: int

    @abstractmethod
    def answer(self, query: Query) -> int:
        raise NotImplementedError


class _Knowledge:
    """Bits forced by the answers so far, with unit propagation over 0-answered conjunctions."""

    def __init__(self) -> None:
        self.known: Dict[int, int] = {}
        self.zero_clauses: List[Query] = []

    def determined(self, query: Query) -> bool:
        if any(self.known.get(var) == 0 for var in query):
            return True
        return all(self.known.get(var) == 1 for var in query)

    def add(self, query: Query, answer: int) -> None:
        if answer:
            for var in query:
                self._set(var, 1)
        else:
            self.zero_clauses.append(query)
        self._propagate()

    def _set(self, var: int, value: int) -> None:
        if self.known.get(var, value) != value:
            raise ProtocolError(f"answers force position {var} to both 0 and 1")
        self.known[var] = value

    def _propagate(self) -> None:
        changed = True
        while changed:
            changed = False
            remaining = []
            for clause in self.zero_clauses:
                if any(self.known.get(var) == 0 for var in clause):
                    continue
                open_vars = [var for var in clause if var not in self.known]
                if not open_vars:
                    raise ProtocolError(f"conjunction over {list(clause)} answered 0 but every member is 1")
                if len(open_vars) == 1:
                    self._set(open_vars[0], 0)
                    changed = True
                    continue
                remaining.append(clause)
            self.zero_clauses = remaining


def _normalize(move: Sequence[int], arity: int) -> Query:
    query = tuple(sorted(set(int(var) for var in move)))
    if not query:
        raise ProtocolError("empty query")
    if query[0] < 1 or query[-1] > arity:
        raise ProtocolError(f"query {list(query)} outside [1, {arity}]")
    return query


def play(querier: Querier, responder: Responder, query_limit: int) -> GameTranscript:
    if querier.arity != responder.arity:
        raise InputShapeError(f"querier arity {querier.arity} != responder arity {responder.arity}")
    if query_limit < 1:
        raise UsageError("query_limit must be >= 1")
    transcript = GameTranscript()
    knowledge = _Knowledge()
    while True:
        move = querier.next_move(transcript)
        if isinstance(move, Output):
            transcript.output = int(move.value)
            return transcript
        if len(transcript.queries) >= query_limit:
            transcript.complete = False
            logger.debug("query limit %d reached without output", query_limit)
            return transcript
        query = _normalize(move, querier.arity)
        if knowledge.determined(query):
            raise ProtocolError(f"query {list(query)} only touches already fixed positions")
        answer = int(responder.answer(query))
        if answer not in (0, 1):
            raise ProtocolError(f"responder answered {answer}")
        knowledge.add(query, answer)
        transcript.record(query, answer)


# --- responders ---------------------------------------------------------------------


class TruthfulResponder(Responder):
    def __init__(self, x: Sequence[int]) -> None:
        self.x = tuple(int(bit) for bit in x)
        self.arity = len(self.x)

    def answer(self, query: Query) -> int:
        return int(all(self.x[var - 1] for var in query))


class TribesAdversary(Responder):
    """Answers 1 exactly when a query completes its block while fewer than n*n bits are queried."""

    def __init__(self, n: int) -> None:
        if n < 1:
            raise InputShapeError("n must be >= 1")
        self.n = n
        self.arity = n * n
        self.blocks: List[set] = [set() for _ in range(n)]
        self.total = 0
        self.assignment: Dict[int, int] = {}

    def _answer_single(self, var: int) -> int:
        if not 1 <= var <= self.arity:
            raise ProtocolError(f"query {var} outside [1, {self.arity}]")
        if var in self.assignment:
            raise ProtocolError(f"position {var} was already queried")
        block = self.blocks[(var - 1) // self.n]
        block.add(var)
        self.total += 1
        bit = int(len(block) == self.n and self.total < self.n * self.n)
        self.assignment[var] = bit
        return bit

    def answer(self, query: Query) -> int:
        # conjunction members are fed in ascending order
        bits = [self._answer_single(var) for var in sorted(query)]
        return int(all(bits))

    def state(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(sorted(block)) for block in self.blocks)


def tribes_adversary(n: int) -> TribesAdversary:
    return TribesAdversary(n)


class CheatsheetAdversary(Responder):
    """Cell bits answer 0; copy bits go to an independent TRIBES adversary per copy."""

    def __init__(self, spec: CheatSheetSpec) -> None:
        if not isinstance(spec.base, Tribes):
            raise UsageError("the cheat-sheet adversary needs a tribes base function")
        self.spec = spec
        self.arity = spec.arity
        self.copies = [TribesAdversary(spec.base.n) for _ in range(spec.c)]

    def answer(self, query: Query) -> int:
        if len(query) != 1:
            raise ProtocolError("the cheat-sheet game takes single-bit queries only")
        position = query[0]
        if not 1 <= position <= self.arity:
            raise ProtocolError(f"query {position} outside [1, {self.arity}]")
        region, index, offset = self.spec.locate(position - 1)
        if region == "cell":
            return 0
        return self.copies[index - 1].answer((offset + 1,))


def cheatsheet_adversary(n: int, c: int, config: Config = DEFAULT) -> CheatsheetAdversary:
    return CheatsheetAdversary(cheat_sheet_spec(tribes(n), c, config))


# --- exact TRIBES game value ------------------------------------------------------------

Assignment = Tuple[Optional[int], ...]


def tribes_value_determined(n: int, assignment: Assignment) -> Optional[int]:
    """Value of TRIBES_n on every completion, or None when completions disagree."""
    all_ones = [1 if bit is None else bit for bit in assignment]
    all_zeros = [0 if bit is None else bit for bit in assignment]
    high = _tribes_value(n, all_ones)
    low = _tribes_value(n, all_zeros)
    # monotone: the extreme completions bound every other one
    return high if high == low else None


def _tribes_value(n: int, bits: Sequence[int]) -> int:
    return int(all(any(bits[i * n:(i + 1) * n]) for i in range(n)))


def _adversary_bit(n: int, assignment: Assignment, var: int) -> int:
    block = var // n
    filled = sum(1 for bit in assignment[block * n:(block + 1) * n] if bit is not None) + 1
    total = sum(1 for bit in assignment if bit is not None) + 1
    return int(filled == n and total < n * n)


class _GameSearch:
    def __init__(self, n: int) -> None:
        self.n = n
        self.memo: Dict[Assignment, int] = {}
        self.forcing_verified = True

    def value(self, assignment: Assignment) -> int:
        cached = self.memo.get(assignment)
        if cached is not None:
            return cached
        queried = sum(1 for bit in assignment if bit is not None)
        if tribes_value_determined(self.n, assignment) is not None:
            if queried < self.n * self.n:
                self.forcing_verified = False
            self.memo[assignment] = 0
            return 0
        best = None
        for var, bit in enumerate(assignment):
            if bit is not None:
                continue
            best_here = self.child_value(assignment, var)
            if best is None or best_here < best:
                best = best_here
        self.memo[assignment] = best
        return best

    def child_value(self, assignment: Assignment, var: int) -> int:
        answer = _adversary_bit(self.n, assignment, var)
        child = assignment[:var] + (answer,) + assignment[var + 1:]
        return (1 - answer) + self.value(child)


@dataclass(frozen=True)
class GameValue:
    value: int
    states_explored: int
    forcing_verified: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "states_explored": self.states_explored,
            "forcing_verified": self.forcing_verified,
        }


def _first_move_value(n: int, var: int) -> Tuple[int, int, bool]:
    search = _GameSearch(n)
    value = search.child_value((None,) * (n * n), var)
    return value, len(search.memo), search.forcing_verified


def adversary_game_value(n: int, jobs: int = 1) -> GameValue:
    """Fewest 0-answers any querier can force out of the TRIBES adversary."""
    if not 1 <= n <= 3:
        raise UsageError("the exact game search supports 1 <= n <= 3")
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_first_move_value, [n] * (n * n), range(n * n)))
        return GameValue(
            value=min(value for value, _, _ in results),
            states_explored=sum(states for _, states, _ in results),
            forcing_verified=all(verified for _, _, verified in results),
        )
    search = _GameSearch(n)
    value = search.value((None,) * (n * n))
    logger.info("TRIBES_%d game value %d over %d states", n, value, len(search.memo))
    return GameValue(value, len(search.memo), search.forcing_verified)


# --- queriers ----------------------------------------------------------------------------


class TribesAndQuerier(Querier):
    """Probe all but the last bit of each block, then one conjunction over the open blocks."""

    def __init__(self, n: int) -> None:
        if n < 1:
            raise InputShapeError("n must be >= 1")
        self.n = n
        self.arity = n * n
        self.probes = [i * n + j + 1 for i in range(n) for j in range(n - 1)]

    def _open_blocks(self, transcript: GameTranscript) -> List[int]:
        answers = transcript.queries[: len(self.probes)]
        return [
            i for i in range(self.n)
            if not any(record.answer for record in answers[i * (self.n - 1):(i + 1) * (self.n - 1)])
        ]

    def next_move(self, transcript: GameTranscript) -> Move:
        k = len(transcript.queries)
        for record, probe in zip(transcript.queries, self.probes):
            if record.variables != (probe,):
                raise ProtocolError(f"transcript diverged from the strategy at position {probe}")
        if k < len(self.probes):
            return (self.probes[k],)
        open_blocks = self._open_blocks(transcript)
        if not open_blocks:
            return Output(1)
        final = tuple((i + 1) * self.n for i in open_blocks)
        if k == len(self.probes):
            return final
        if k == len(self.probes) + 1 and transcript.queries[-1].variables == final:
            return Output(transcript.queries[-1].answer)
        raise ProtocolError("transcript is inconsistent with the strategy")


def tribes_and_strategy(n: int) -> TribesAndQuerier:
    return TribesAndQuerier(n)


class OptimalQuerier(Querier):
    """Plays an optimal tree for the chosen charge (0-answers by default) against any responder."""

    def __init__(self, f: StructuredFunction, charge=zero_charge, config: Config = DEFAULT) -> None:
        self.table = materialize(f, config)
        self.arity = f.arity
        self.solver = DepthSolver(charge)

    def next_move(self, transcript: GameTranscript) -> Move:
        known = transcript.single_answers()
        if len(known) != len(transcript.queries):
            raise ProtocolError("optimal querier only reads single-bit answers")
        rho = Restriction.from_assignment(self.arity, known)
        sub = restrict_table(self.table, rho)
        var = self.solver.best_variable(sub.values, sub.arity)
        if var is None:
            return Output(int(sub.values[0]))
        return (rho.free_positions[var] + 1,)


class ScriptedQuerier(Querier):
    """Asks a fixed sequence of positions, then outputs ``guess``."""

    def __init__(self, arity: int, script: Sequence[int], guess: int = 0) -> None:
        self.arity = arity
        self.script = tuple(int(pos) for pos in script)
        self.guess = guess

    def next_move(self, transcript: GameTranscript) -> Move:
        k = len(transcript.queries)
        if k < len(self.script):
            return (self.script[k],)
        return Output(self.guess)


class SequentialQuerier(ScriptedQuerier):
    def __init__(self, arity: int, budget: int) -> None:
        super().__init__(arity, range(1, min(budget, arity) + 1))


class CellSweepQuerier(ScriptedQuerier):
    """Reads the first bit of every cell, then copy bits in order."""

    def __init__(self, spec: CheatSheetSpec, budget: int) -> None:
        cells = [spec.cell_positions(address).start + 1 for address in range(spec.cell_count)]
        copies = [pos + 1 for i in range(1, spec.c + 1) for pos in spec.copy_positions(i)]
        super().__init__(spec.arity, (cells + copies)[:budget])


class CopyFirstQuerier(ScriptedQuerier):
    """Reads the copies block by block, then the cells."""

    def __init__(self, spec: CheatSheetSpec, budget: int) -> None:
        copies = [pos + 1 for i in range(1, spec.c + 1) for pos in spec.copy_positions(i)]
        cells = [pos + 1 for address in range(spec.cell_count) for pos in spec.cell_positions(address)]
        super().__init__(spec.arity, (copies + cells)[:budget])


# --- cheat-sheet transcript analysis ---------------------------------------------------------


@dataclass(frozen=True)
class CheatsheetOutcome:
    satisfied: bool
    case: str
    total_queries: int
    copy_queries: int
    one_answers: int
    untouched_cell: Optional[int] = None
    completions: Dict[int, Tuple[int, ...]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "satisfied": self.satisfied,
            "case": self.case,
            "total_queries": self.total_queries,
            "copy_queries": self.copy_queries,
            "one_answers": self.one_answers,
            "untouched_cell": self.untouched_cell,
            "completions": {str(k): "".join(map(str, v)) for k, v in self.completions.items()},
        }


def _padded_claim(positions: Sequence[int], copy_bits: Sequence[int], size: int) -> CertificateClaim:
    entries = [(pos, copy_bits[pos - 1]) for pos in positions]
    while len(entries) < size:
        entries.append(entries[-1])
    return CertificateClaim.of(entries[:size])


def _completion(
    spec: CheatSheetSpec, known: Dict[int, int], cell: int, flip: bool, config: Config
) -> Tuple[int, ...]:
    bits = [0] * spec.arity
    for position, bit in known.items():
        bits[position - 1] = bit
    claims = []
    for i in range(1, spec.c + 1):
        wanted = (cell >> (i - 1)) & 1
        for pos in spec.copy_positions(i):
            if pos + 1 not in known:
                bits[pos] = wanted
        copy_bits = [bits[pos] for pos in spec.copy_positions(i)]
        positions = certificate_at(spec.base, copy_bits, config)[1].positions
        claims.append(_padded_claim(positions, copy_bits, spec.cert_size))
    if flip:
        first = claims[0].entries
        claims[0] = CertificateClaim(((first[0][0], 1 - first[0][1]),) + first[1:])
    cell_range = spec.cell_positions(cell)
    bits[cell_range.start:cell_range.stop] = spec.encode_cell(claims)
    return tuple(bits)


def analyze_cheatsheet_transcript(
    spec: CheatSheetSpec, transcript: GameTranscript, config: Config = DEFAULT
) -> CheatsheetOutcome:
    """Either n^2 input-copy bits were read, or an untouched cell lets both outputs be realized."""
    known = transcript.single_answers()
    if len(known) != len(transcript.queries):
        raise ProtocolError("cheat-sheet transcripts hold single-bit queries only")
    total = len(transcript.queries)
    copy_queries = sum(1 for pos in known if spec.locate(pos - 1)[0] == "copy")
    common = dict(total_queries=total, copy_queries=copy_queries, one_answers=transcript.one_count)
    if copy_queries >= spec.base_arity:
        return CheatsheetOutcome(True, "queries", **common)
    touched = {spec.locate(pos - 1)[1] for pos in known if spec.locate(pos - 1)[0] == "cell"}
    untouched = [address for address in range(spec.cell_count) if address not in touched]
    if not untouched:
        return CheatsheetOutcome(False, "none", **common)
    cell = untouched[0]
    f = cheat_sheet(spec)
    completions: Dict[int, Tuple[int, ...]] = {}
    for flip, expected in ((False, 1), (True, 0)):
        bits = _completion(spec, known, cell, flip, config)
        if f.evaluate(bits) == expected:
            completions[expected] = bits
    satisfied = set(completions) == {0, 1}
    return CheatsheetOutcome(satisfied, "flip" if satisfied else "none", untouched_cell=cell,
                             completions=completions, **common)


@dataclass(frozen=True)
class CheatsheetSearch:
    sequences: int
    satisfied: int
    max_one_answers: int
    failures: Tuple[Tuple[int, ...], ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sequences": self.sequences,
            "satisfied": self.satisfied,
            "max_one_answers": self.max_one_answers,
            "failures": [list(seq) for seq in self.failures],
        }


def exhaustive_cheatsheet_search(
    n: int, c: int, length: Optional[int] = None, config: Config = DEFAULT
) -> CheatsheetSearch:
    """Every ordered query sequence over the copy bits and the first bit of each cell."""
    spec = cheat_sheet_spec(tribes(n), c, config)
    length = spec.base_arity - 1 if length is None else length
    positions = [pos + 1 for i in range(1, c + 1) for pos in spec.copy_positions(i)]
    positions += [spec.cell_positions(address).start + 1 for address in range(spec.cell_count)]
    sequences = satisfied = max_ones = 0
    failures = []
    for script in itertools.permutations(positions, length):
        transcript = play(ScriptedQuerier(spec.arity, script), CheatsheetAdversary(spec), max(1, length))
        outcome = analyze_cheatsheet_transcript(spec, transcript, config)
        sequences += 1
        max_ones = max(max_ones, outcome.one_answers)
        if outcome.satisfied:
            satisfied += 1
        else:
            failures.append(script)
    logger.info("cheat-sheet search n=%d c=%d: %d/%d sequences satisfy", n, c, satisfied, sequences)
    return CheatsheetSearch(sequences, satisfied, max_ones, tuple(failures))


def replay_all_inputs(querier_factory, f: StructuredFunction, query_limit: int, config: Config = DEFAULT):
    """Play a fresh querier against a truthful responder on every input of ``f``.

    Returns (all outputs correct, most queries used, most 0-answers).
    """
    table = materialize(f, config)
    correct = True
    most_queries = most_zeros = 0
    for index in range(2 ** f.arity):
        x = [(index >> i) & 1 for i in range(f.arity)]
        transcript = play(querier_factory(), TruthfulResponder(x), query_limit)
        correct = correct and transcript.complete and transcript.output == int(table.values[index])
        most_queries = max(most_queries, len(transcript.queries))
        most_zeros = max(most_zeros, transcript.zero_count)
    return correct, most_queries, most_zeros
