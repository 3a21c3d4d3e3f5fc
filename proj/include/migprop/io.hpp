#pragma once

// CSV track ingestion and emission. Format: header `path_id,t,x,y`,
// comma-separated, `#` lines are comments. Strict parsing: any malformed
// row aborts with its line number.

#include <iosfwd>
#include <string>
#include <vector>

#include "migprop/model.hpp"

namespace migprop {

struct IngestResult {
    std::vector<TrackSeries> tracks;        // grouped by path, time-sorted
    std::vector<std::string> warnings;      // skipped short paths etc.
    double mean_latitude_deg = 0.0;         // mean of raw y over all rows
};

struct IngestOptions {
    // Equirectangular lon/lat -> km using the dataset mean latitude:
    //   x <- x * cos(mean_lat) * 111.32, y <- y * 111.32
    bool project_lonlat = false;
    // Subtracted after projection so the habitat's lower corner is the origin.
    double origin_x = 0.0;
    double origin_y = 0.0;
};

IngestResult ingest_tracks(std::istream& in, const std::string& source_name,
                           const IngestOptions& opts = {});
IngestResult ingest_tracks_file(const std::string& path, const IngestOptions& opts = {});

// Emits tracks in the ingestion format at 17 significant digits (lossless
// round-trip); comment_lines are written first, `# `-prefixed.
void write_tracks_csv(std::ostream& out, const std::vector<TrackSeries>& tracks,
                      const std::vector<std::string>& comment_lines = {});
void write_tracks_csv_file(const std::string& path, const std::vector<TrackSeries>& tracks,
                           const std::vector<std::string>& comment_lines = {});

std::string format_double(double v);  // shortest representation that round-trips

}  // namespace migprop
