# Relay CMDP model: states, actions, costs and the truncated kernel
