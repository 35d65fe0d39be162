"""
Logging configuration for the relay AoI toolkit
"""
import logging
import os
from typing import Dict, Optional

import colorlog


LOGGER_NAME = 'RelayAoI'


class RelayLogger:
    """Console (coloured) + optional file logging for experiment runs"""

    def __init__(
        self,
        name: str = LOGGER_NAME,
        log_file: Optional[str] = None,
        level: str = 'INFO',
        format_type: str = 'detailed'
    ):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(getattr(logging, level.upper()))

        # Clear existing handlers
        self.logger.handlers.clear()

        if format_type == 'detailed':
            pattern = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        else:
            pattern = '%(levelname)s: %(message)s'

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(colorlog.ColoredFormatter(
            '%(log_color)s' + pattern,
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        self.logger.addHandler(console_handler)

        if log_file:
            directory = os.path.dirname(log_file)
            if directory:
                os.makedirs(directory, exist_ok=True)
            file_handler = logging.FileHandler(log_file)
            file_handler.setFormatter(logging.Formatter(pattern, datefmt='%Y-%m-%d %H:%M:%S'))
            self.logger.addHandler(file_handler)

    def info(self, message: str):
        self.logger.info(message)

    def warning(self, message: str):
        self.logger.warning(message)

    def error(self, message: str):
        self.logger.error(message)

    def debug(self, message: str):
        self.logger.debug(message)

    def log_cmdp_solution(self, summary: Dict):
        """Log the outcome of the constrained policy design"""
        self.info("=" * 50)
        self.info("Constrained Policy Design")
        self.info(f"Budget gamma_max: {summary['gamma_max']}")
        if summary.get('constraint_slack'):
            self.info("Constraint slack at lambda=0; unconstrained policy is feasible")
        self.info(f"lambda-: {summary['lambda_minus']:.6f}  lambda+: {summary['lambda_plus']:.6f}")
        self.info(f"J(pi+): {summary['j_plus']:.4f}  D(pi+): {summary['d_plus']:.4f}")
        self.info(f"J(pi-): {summary['j_minus']:.4f}  D(pi-): {summary['d_minus']:.4f}")
        self.info(f"eta: {summary['eta']:.4f}  J_mix: {summary['j_mix']:.4f}")
        self.info(f"Dual bound: {summary['dual_bound']:.4f}")
        self.info(f"RVI iterations: {summary['rvi_iterations']}  wall time: {summary['wall_time_s']:.1f}s")
        self.info("=" * 50)

    def log_simulation_summary(self, policy_name: str, mean_row: Dict, num_seeds: int):
        """Log the seed-averaged simulation metrics"""
        self.info("=" * 50)
        self.info(f"Simulation of '{policy_name}' over {num_seeds} seeds")
        self.info(f"Average sum AoI: {mean_row['avg_sum_aoi']:.4f}")
        self.info(f"Average transmissions: {mean_row['avg_transmissions']:.4f}")
        if mean_row.get('capped_avg_sum_aoi') is not None:
            self.info(f"Average sum AoI with capped ages: {mean_row['capped_avg_sum_aoi']:.4f}")
        if mean_row.get('exact_avg_sum_aoi') is not None:
            self.info(f"Exact-chain sum AoI: {mean_row['exact_avg_sum_aoi']:.4f}")
        self.info("=" * 50)

    def log_sweep_point(self, scenario: str, gamma_max: float, values: Dict[str, float]):
        parts = ', '.join(f"{method}={value:.3f}" for method, value in values.items())
        self.info(f"[{scenario}] gamma_max={gamma_max}: {parts}")


def setup_logger(config: dict = None) -> RelayLogger:
    """Setup logger from config"""
    if config is None:
        config = {}

    logging_config = config.get('logging', {}) or {}

    return RelayLogger(
        name=LOGGER_NAME,
        log_file=logging_config.get('log_file'),
        level=logging_config.get('level', 'INFO'),
        format_type=logging_config.get('format', 'detailed')
    )
