#pragma once

#include "xrdfs/dataset.hpp"
#include "xrdfs/encoding.hpp"
#include "xrdfs/errors.hpp"
#include "xrdfs/ground_truth.hpp"
#include "xrdfs/hope.hpp"
#include "xrdfs/ntriples.hpp"
#include "xrdfs/ontology.hpp"
#include "xrdfs/pipeline.hpp"
#include "xrdfs/rdf.hpp"
#include "xrdfs/reasoner.hpp"
#include "xrdfs/records_io.hpp"
