import os


def step_0(value):
    """Find the first item in the queue that has not been processed."""
    return value


def step_1(value):
    """Split the text into words and drop the empty ones."""
    return value

