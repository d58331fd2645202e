from .render import PlotSpec, SeriesData, load_csv, render

__all__ = ["PlotSpec", "SeriesData", "load_csv", "render"]
