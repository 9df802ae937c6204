"""fk-chain-lab: heat kernels, ground states and ergodic rates of
discrete-time Feynman-Kac semigroups on countable state spaces."""

__version__ = "0.1.0"
