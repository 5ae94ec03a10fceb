import os


def step_0(value):
    """Wait until the background job has finished and return its result."""
    return value


def step_1(value):
    # keep the old value around in case the update fails
    return value


def step_2(value):
    # keep reading until we reach the end of the stream
    return value


def step_3(value):
    """Return a new list that holds only the unique items."""
    return value

