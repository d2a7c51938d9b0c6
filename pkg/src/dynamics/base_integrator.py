# File: src/dynamics/base_integrator.py
# Base class for the fixed-step characteristic integrators

from abc import ABC, abstractmethod
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..utils.logger import logger

RateFunction = Callable[[float, np.ndarray], np.ndarray]


def rk4_step(rate: RateFunction, t: float, y: np.ndarray, dt: float) -> np.ndarray:
    """
    One classic fourth-order Runge-Kutta step

    Args:
        rate (callable): f(t, y)
        t (float): current time
        y (np.ndarray): current state (any shape)
        dt (float): step

    Returns:
        np.ndarray: state at t + dt
    """
    # k1
    k1 = dt * rate(t, y)
    y_1 = y + 0.5 * k1

    # k2
    k2 = dt * rate(t + 0.5 * dt, y_1)
    y_2 = y + 0.5 * k2

    # k3
    k3 = dt * rate(t + 0.5 * dt, y_2)
    y_3 = y + k3

    # k4
    k4 = dt * rate(t + dt, y_3)

    return y + (k1 / 6 + k2 / 3 + k3 / 3 + k4 / 6)


def step_plan(t_final: float, dt: float) -> Tuple[int, float]:
    """Number of equal steps covering [0, t_final] with step at most dt"""
    if t_final <= 0:
        return 0, dt
    steps = int(np.ceil(t_final / dt - 1e-9))
    return steps, t_final / steps


class Integrator(ABC):
    """
    Base class for all characteristic integrators

    Subclasses provide the step; the base keeps time, state and the
    recorded history.
    """

    def __init__(self, name: str, dt: float):
        """
        Initialize base integrator

        Args:
            name (str): label used in log lines
            dt (float): fixed step
        """
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.name = name
        self.dt = dt
        self.t = 0.0
        self.state: Optional[np.ndarray] = None
        self.steps_taken = 0
        self.running = False

    def start(self, state: np.ndarray, t0: float = 0.0):
        """Set the initial condition"""
        self.state = np.array(state, copy=True)
        self.t = t0
        self.steps_taken = 0
        self.running = True

    @abstractmethod
    def step(self, dt: Optional[float] = None) -> np.ndarray:
        """Advance by one step and return the new state"""
        pass

    def stop(self):
        self.running = False
        logger.debug(f"{self.name}: stopped at t={self.t:.6g} after {self.steps_taken} steps")

    def run(self, t_final: float, record_every: int = 1,
            callback: Optional[Callable[[float, np.ndarray], bool]] = None) -> Tuple[np.ndarray, List[np.ndarray]]:
        """
        Integrate from the current time to t_final

        The step is shrunk uniformly so that t_final is hit exactly.

        Args:
            t_final (float): end time
            record_every (int): keep every n-th state (the last one always)
            callback (callable): f(t, state) -> bool; returning False stops early

        Returns:
            tuple: (recorded times, recorded states)
        """
        if self.state is None:
            raise RuntimeError(f"{self.name}: start() must be called before run()")
        steps, h = step_plan(t_final - self.t, self.dt)
        times = [self.t]
        states = [self.state.copy()]
        for idx in range(1, steps + 1):
            self.step(h)
            if callback is not None and not callback(self.t, self.state):
                times.append(self.t)
                states.append(self.state.copy())
                break
            if idx % record_every == 0 or idx == steps:
                times.append(self.t)
                states.append(self.state.copy())
        self.stop()
        return np.array(times), states


class RK4Integrator(Integrator):
    """Fixed-step RK4 on y' = f(t, y)"""

    def __init__(self, rate: RateFunction, dt: float, name: str = "rk4"):
        super().__init__(name, dt)
        self.rate = rate

    def step(self, dt: Optional[float] = None) -> np.ndarray:
        h = self.dt if dt is None else dt
        self.state = rk4_step(self.rate, self.t, self.state, h)
        self.t += h
        self.steps_taken += 1
        return self.state
