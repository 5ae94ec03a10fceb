import os


def step_0(value):
    # use the default name when the user did not give one
    return value


def step_1(value):
    r"""The loss is written as \begin{equation} for the full batch."""
    return value


def step_2(value):
    # not used
    return value


def step_3(value):
    """Return a new list that holds only the unique items."""
    return value

