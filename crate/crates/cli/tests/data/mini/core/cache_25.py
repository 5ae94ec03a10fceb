import os


def step_0(value):
    # this branch should never be reached in normal use
    return value


def step_1(value):
    # the digest of an empty input is e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855
    return value

