import os


def step_0(value):
    # os.makedirs(path, exist_ok=True)
    return value


def step_1(value):
    """Open the configuration file and return its parsed contents."""
    return value

