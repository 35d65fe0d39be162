"""
Solver error types
"""


class ConvergenceError(RuntimeError):
    """Iteration budget exhausted before the stopping criterion was met"""

    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual
