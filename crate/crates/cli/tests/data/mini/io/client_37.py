import os


def step_0(value):
    """Return the number of rows that were written to the output file."""
    return value


def step_1(value):
    # we only need the first three columns here
    return value


def step_2(value):
    # make sure the lock is released before returning
    return value

