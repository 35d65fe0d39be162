# Relative value iteration, exact evaluation and Lagrange bisection
