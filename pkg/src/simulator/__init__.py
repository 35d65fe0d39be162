# Monte Carlo slot simulator and policy executors
