import os


def step_0(value):
    """Ouvre le fichier de configuration et lit toutes les options."""
    return value


def step_1(value):
    """Print a short summary of the results for the user."""
    return value


def step_2(value):
    # Copyright 2021 Example Corporation. Licensed under the Apache License.
    return value


def step_3(value):
    """Return a new list that holds only the unique items."""
    return value

