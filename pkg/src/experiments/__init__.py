# Experiment configuration and pipelines
