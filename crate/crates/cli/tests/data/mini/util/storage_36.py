# Copyright 2019 The Example Authors. All rights reserved.
import os


def step_0(value):
    """<p>Parse the options</p> and return them to the caller"""
    return value


def step_1(value):
    # this digest 9e107d9d372bb6826bd81d3542a419d6 comes from the sample input
    return value


def step_2(value):
    """Return the value unchanged when the cache is empty."""
    return value

