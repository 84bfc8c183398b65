"""Small automata shared by the automaton, Christol and acceptance tests."""

import numpy as np

from autalg.automata import Dfao, thue_morse


def rudin_shapiro() -> Dfao:
    # state = (parity of "11" blocks, last digit read)
    return Dfao(2, ((0, 1), (0, 3), (2, 3), (2, 1)), 0, (0, 0, 1, 1))


def powers_of_two() -> Dfao:
    return Dfao(2, ((0, 1), (1, 2), (2, 2)), 0, (0, 1, 0))


def digit_sum_mod3() -> Dfao:
    return Dfao(3, ((0, 1, 2), (1, 2, 0), (2, 0, 1)), 0, (0, 1, 2))


def twos_parity_base3() -> Dfao:
    return Dfao(3, ((0, 0, 1), (1, 1, 0)), 0, (0, 1))


def cantor_indicator() -> Dfao:
    # 1 when the base-3 expansion avoids the digit 1
    return Dfao(3, ((0, 1, 0), (1, 1, 1)), 0, (1, 0))


def period_doubling() -> Dfao:
    # parity of the number of trailing ones of n, read most significant digit first
    return Dfao(2, ((0, 1), (0, 2), (0, 1)), 0, (0, 1, 0))


CORPUS = {
    "thue_morse": thue_morse,
    "rudin_shapiro": rudin_shapiro,
    "powers_of_two": powers_of_two,
    "digit_sum_mod3": digit_sum_mod3,
    "twos_parity_base3": twos_parity_base3,
    "cantor_indicator": cantor_indicator,
    "period_doubling": period_doubling,
}


def random_dfao(rng: np.random.Generator, p: int, states: int, zero_loop: bool = True) -> Dfao:
    delta = [[int(rng.integers(0, states)) for _ in range(p)] for _ in range(states)]
    if zero_loop:
        delta[0][0] = 0
    tau = [int(rng.integers(0, p)) for _ in range(states)]
    return Dfao(p, tuple(map(tuple, delta)), 0, tuple(tau))
