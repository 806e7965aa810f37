# -*- Mode: python; tab-width: 4; indent-tabs-mode:nil; coding:utf-8 -*-
# vim: tabstop=4 expandtab shiftwidth=4 softtabstop=4
#
# locobell --- locobell.readthedocs.io
#
# Released under the GNU Public Licence, v2 or any higher version
#

"""
Sample loops --- :mod:`locobell.lib.base`
=========================================

Several locobell analyses evaluate one expensive quantity at many
independent samples: the force integral at each point of a parameter grid,
lower and upper bounds at each test point of a domain, or membership of
each random step function. :class:`AnalysisBase` runs such loops.

A subclass receives its samples in ``__init__`` and defines
``_single_sample``, which reads the current sample from ``self._sample``
and its position among the analysed samples from ``self._sample_index``.
``_prepare`` and ``_conclude`` allocate and finalise results around the
loop.

.. code-block:: python

   class LevelAtPoints(AnalysisBase):

       def __init__(self, domain, points, **kwargs):
           super().__init__(points, **kwargs)
           self.domain = domain

       def _prepare(self):
           self.levels = np.full(self.n_samples, np.nan)

       def _single_sample(self):
           self.levels[self._sample_index] = self.domain.inner.level(self._sample)

   levels = LevelAtPoints(domain, points).run(stop=10).levels

"""
import logging

import numpy as np
from tqdm.auto import tqdm

logger = logging.getLogger(__name__)


class AnalysisBase(object):
    """Loop an analysis over independent samples.

    Attributes
    ----------
    indices : numpy.ndarray
        Positions, in the sequence passed at construction, of the samples
        analysed by the last call to :meth:`run`.
    n_samples : int
        Number of samples analysed by the last call to :meth:`run`.

    """

    def __init__(self, samples, verbose=False):
        """
        Parameters
        ----------
        samples : sequence
            Grid parameters, points or step functions, indexable by position.
        verbose : bool, optional
           Show a progress bar while looping, default ``False``.

        """
        self._samples = samples
        self._verbose = verbose

    def _select(self, start=None, stop=None, step=None):
        start, stop, step = slice(start, stop, step).indices(len(self._samples))
        self.start, self.stop, self.step = start, stop, step
        self.indices = np.arange(start, stop, step, dtype=int)
        self.n_samples = len(self.indices)

    def _single_sample(self):
        """Evaluate the analysis at ``self._sample``."""
        raise NotImplementedError("Only implemented in child classes")

    def _prepare(self):
        """Allocate results once the samples are selected."""
        pass  # pylint: disable=unnecessary-pass

    def _conclude(self):
        pass  # pylint: disable=unnecessary-pass

    def run(self, start=None, stop=None, step=None, verbose=None):
        """Evaluate the analysis at a slice of the samples.

        Parameters
        ----------
        start, stop, step : int, optional
            Slice of the samples to analyse, all of them by default.
        verbose : bool, optional
            Show a progress bar. Defaults to the value given at construction.

        Returns
        -------
        self
            The analysis, with its results filled in.

        """
        verbose = self._verbose if verbose is None else verbose

        self._select(start, stop, step)
        logger.info(f"{type(self).__name__}: analysing {self.n_samples} of {len(self._samples)} samples")
        self._prepare()

        for position, index in enumerate(tqdm(self.indices, disable=not verbose)):
            self._sample_index = position
            self._sample = self._samples[index]
            self._single_sample()

        self._conclude()
        logger.info(f"{type(self).__name__}: done")
        return self
